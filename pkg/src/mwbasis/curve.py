"""Exact arithmetic on E_(p,q): y^2 = x^3 - p^2 x + q^2 over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .ntutil import is_prime, valuation


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class CurveParams:
    p: int
    q: int


@dataclass(frozen=True)
class Point:
    """A rational point; ``x is None`` encodes the identity."""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    @classmethod
    def affine(cls, x, y) -> "Point":
        return cls(Fraction(x), Fraction(y))

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        if self.is_identity:
            return "Point(O)"
        return f"Point({self.x}, {self.y})"


IDENTITY = Point()


@dataclass(frozen=True)
class Curve:
    params: CurveParams
    a: int
    b: int
    disc: int
    disc_prime: int
    c4: int
    c6: int
    b2: int
    b4: int
    b6: int
    b8: int

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def P1(self) -> Point:
        return Point.affine(0, self.q)

    @property
    def P2(self) -> Point:
        return Point.affine(-self.p, self.q)

    def rhs(self, x):
        return x**3 + self.a * x + self.b


def new_curve(p: int, q: int) -> Curve:
    for name, v in (("p", p), ("q", q)):
        if not isinstance(v, int) or v <= 5 or not is_prime(v):
            raise DomainError(f"{name}={v!r} must be a prime greater than 5")
    return _build(p, q)


def _build(p: int, q: int) -> Curve:
    a, b = -p * p, q * q
    disc_prime = 4 * p**6 - 27 * q**4
    if disc_prime == 0:
        raise DomainError("singular curve")
    # a1 = a2 = a3 = 0, a4 = a, a6 = b
    return Curve(
        params=CurveParams(p, q),
        a=a,
        b=b,
        disc=16 * disc_prime,
        disc_prime=disc_prime,
        c4=-48 * a,
        c6=-864 * b,
        b2=0,
        b4=2 * a,
        b6=4 * b,
        b8=-a * a,
    )


def is_on_curve(c: Curve, pt: Point) -> bool:
    if pt.is_identity:
        return True
    return pt.y * pt.y == c.rhs(pt.x)


def negate(pt: Point) -> Point:
    if pt.is_identity:
        return pt
    return Point(pt.x, -pt.y)


def add(c: Curve, pt1: Point, pt2: Point) -> Point:
    if __debug__:
        assert is_on_curve(c, pt1) and is_on_curve(c, pt2), "point not on curve"
    if pt1.is_identity:
        return pt2
    if pt2.is_identity:
        return pt1
    x1, y1, x2, y2 = pt1.x, pt1.y, pt2.x, pt2.y
    if x1 == x2:
        if y1 != y2 or y1 == 0:
            return IDENTITY
        slope = (3 * x1 * x1 + c.a) / (2 * y1)
    else:
        slope = (y2 - y1) / (x2 - x1)
    x3 = slope * slope - x1 - x2
    y3 = slope * (x1 - x3) - y1
    return Point(x3, y3)


def double(c: Curve, pt: Point) -> Point:
    return add(c, pt, pt)


def scalar_mul(c: Curve, n: int, pt: Point) -> Point:
    """n * pt by double-and-add; negative n multiplies the negation."""
    if n < 0:
        return scalar_mul(c, -n, negate(pt))
    result = IDENTITY
    addend = pt
    while n:
        if n & 1:
            result = add(c, result, addend)
        n >>= 1
        if n:
            addend = add(c, addend, addend)
    return result


def frac_valuation(x: Fraction, r: int) -> int:
    """r-adic valuation of a nonzero rational."""
    return valuation(x.numerator, r) - valuation(x.denominator, r)


@dataclass(frozen=True)
class ReductionInfo:
    r: int
    kind: str  # "good" | "bad"
    point_class: Optional[str] = None  # "nonsingular" | "singular", bad primes only
    singular_locus: Optional[tuple[int, int]] = None


def _residue(x: Fraction, r: int) -> int:
    return x.numerator * pow(x.denominator, -1, r) % r


def reduce_mod(c: Curve, pt: Point, r: int) -> ReductionInfo:
    """Classify the reduction of ``pt`` modulo the prime ``r``.

    Points at infinity, or with negative r-valuation of x, land on the
    smooth part (the identity) and are reported nonsingular.
    """
    if c.disc % r:
        return ReductionInfo(r, "good")
    if pt.is_identity or (pt.x != 0 and frac_valuation(pt.x, r) < 0):
        return ReductionInfo(r, "bad", "nonsingular")
    x, y = _residue(pt.x, r), _residue(pt.y, r)
    # singular iff both partials of y^2 - x^3 - a x - b vanish
    singular = (3 * x * x + c.a) % r == 0 and (2 * y) % r == 0
    if singular:
        return ReductionInfo(r, "bad", "singular", (x, y))
    return ReductionInfo(r, "bad", "nonsingular")
