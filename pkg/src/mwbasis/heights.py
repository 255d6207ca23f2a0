"""Naive, local and canonical heights on E_(p,q).

Normalization: local heights satisfy lambda_v(P) = 1/2 max(0, log|x(P)|_v)
+ O(1), so the canonical height is half the limit of log H(x(2^n P)) / 4^n.
This is the scale on which the closed-form bounds in :mod:`mwbasis.bounds`
hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .curve import Curve, Point, add, frac_valuation, reduce_mod
from .ntutil import factor, valuation

LOG2 = math.log(2)


class HeightPrecisionError(ArithmeticError):
    """The archimedean iteration hit a pole at working precision."""


class UnsupportedLocalHeight(NotImplementedError):
    """Local height requested at a bad prime outside the supported cases."""


class CoordinateBudgetExceeded(MemoryError):
    pass


@dataclass(frozen=True)
class PrecisionPolicy:
    """Absolute error budget for canonical heights.

    The number of archimedean series terms depends on the curve through the
    per-term bound ``log(2**11 p**4)``; see :meth:`series_terms`.
    """

    target_error: float = 1e-9
    extra_terms: int = 0

    def term_bound(self, c: Curve) -> float:
        return 11 * LOG2 + 4 * math.log(c.p)

    def series_terms(self, c: Curve) -> int:
        # tail of (1/8) sum_{n>=N} 4^-n B is B / (6 * 4^N)
        n = math.ceil(math.log(self.term_bound(c) / (6 * self.target_error), 4))
        return max(n, 1) + self.extra_terms

    def working_bits(self, c: Curve) -> int:
        target_bits = math.ceil(-math.log2(self.target_error))
        # doubling costs about a bit of the iterate per step
        return max(80, 2 * target_bits) + 2 * self.series_terms(c) + 32


DEFAULT_POLICY = PrecisionPolicy()


@dataclass(frozen=True)
class HeightBreakdown:
    archimedean: float
    local_terms: tuple[tuple[int, float], ...] = ()
    # contribution 1/2 sum -ord_r(x) log r over good primes r of the x-denominator
    denominator_term: float = 0.0
    total: float = 0.0

    def local(self, r: int) -> float:
        return dict(self.local_terms).get(r, 0.0)


def naive_height(pt: Point) -> float:
    """log max(|numerator|, denominator) of x(pt); 0 at the identity."""
    if pt.is_identity:
        return 0.0
    return math.log(max(abs(pt.x.numerator), pt.x.denominator))


# --- archimedean place -----------------------------------------------------


def _shifted_b(c: Curve, s: int) -> tuple[int, int, int, int]:
    """b2, b4, b6, b8 of the model in the coordinate x' = x - s."""
    a2, a4, a6 = 3 * s, 3 * s * s + c.a, s**3 + c.a * s + c.b
    return 4 * a2, 2 * a4, 4 * a6, 4 * a2 * a6 - a4 * a4


def _switched_series(c: Curve, t, shift: int, terms: int):
    """sum_{n<terms} 4^-n log|z_n| for t = 1/(x - shift), switching shifts.

    The coordinate alternates between x and x + 1 so that |t| <= 2 after the
    first step; each switch replaces z by z + (s - s') w, which keeps the sum
    equal to the fixed-coordinate series.
    """
    other = {0: -1, -1: 0}
    bs = {s: _shifted_b(c, s) for s in (0, -1)}
    mu = mpmath.mpf(0)
    weight = mpmath.mpf(1)
    for _ in range(terms):
        b2, b4, b6, b8 = bs[shift]
        t2 = t * t
        t3 = t2 * t
        t4 = t2 * t2
        w = 4 * t + b2 * t2 + 2 * b4 * t3 + b6 * t4
        z = 1 - b4 * t2 - 2 * b6 * t3 - b8 * t4
        if abs(w) <= 2 * abs(z):
            mu += weight * mpmath.log(abs(z))
            t = w / z
        else:
            s2 = other[shift]
            zw = z + (shift - s2) * w
            if zw == 0:
                raise HeightPrecisionError("iterate fell on a 2-division pole")
            mu += weight * mpmath.log(abs(zw))
            t = w / zw
            shift = s2
        weight /= 4
    return mu


def archimedean_local_height(c: Curve, pt: Point, pp: PrecisionPolicy = DEFAULT_POLICY) -> float:
    """lambda_infinity(pt) by the duplication series.

    |x| >= 1 uses the leading term 1/2 log|x| with the series from n = 0;
    |x| < 1 uses 1/8 log|F(x)|, F(x) = (x^2 + p^2)^2 - 8 q^2 x, with the
    series from n = 1.
    """
    if pt.is_identity:
        raise ValueError("archimedean height of the identity is infinite")
    terms = pp.series_terms(c)
    with mpmath.workprec(pp.working_bits(c)):
        x = mpmath.mpf(pt.x.numerator) / pt.x.denominator
        fx = (pt.x**2 + c.p**2) ** 2 - 8 * c.q**2 * pt.x
        if abs(pt.x) >= 1:
            lam = mpmath.log(abs(x)) / 2 + _switched_series(c, 1 / x, 0, terms) / 8
        elif fx == 0:
            # x(2P) = 0: start in the shifted coordinate x + 1 instead
            lam = mpmath.log(abs(x + 1)) / 2 + _switched_series(c, 1 / (x + 1), -1, terms) / 8
        else:
            four_y2 = 4 * c.rhs(pt.x)
            # t(2P) = 1/x(2P) = 4 y^2 / F(x), exact before rounding
            t1 = Fraction(four_y2) / fx
            t1 = mpmath.mpf(t1.numerator) / t1.denominator
            lam = mpmath.log(abs(mpmath.mpf(fx.numerator) / fx.denominator)) / 8
            lam += _switched_series(c, t1, 0, terms - 1) / 32
        return float(lam)


# --- non-archimedean places ------------------------------------------------


@lru_cache(maxsize=4096)
def bad_primes(c: Curve) -> tuple[int, ...]:
    return tuple(factor(abs(c.disc)).primes())


def _psi3(c: Curve, x: Fraction) -> Fraction:
    return 3 * x**4 + c.b2 * x**3 + 3 * c.b4 * x**2 + 3 * c.b6 * x + c.b8


def local_height_at_prime(c: Curve, pt: Point, r: int) -> float:
    """lambda_r(pt) at a prime r, on the same scale as the archimedean term."""
    if pt.is_identity:
        raise ValueError("local height of the identity is infinite")
    x = pt.x
    if x != 0 and frac_valuation(x, r) < 0:
        return -0.5 * frac_valuation(x, r) * math.log(r)
    if c.disc % r:
        return 0.0
    info = reduce_mod(c, pt, r)
    if info.point_class == "nonsingular":
        return 0.0
    n_disc = valuation(c.disc, r)
    psi2 = 2 * pt.y
    ord2 = frac_valuation(psi2, r) if psi2 else math.inf
    if c.c4 % r:
        # multiplicative reduction of type I_n
        m = min(ord2, n_disc / 2)
        return -(m * (n_disc - m) / (2 * n_disc)) * math.log(r)
    if r != 2:
        raise UnsupportedLocalHeight(
            f"{pt} is singular mod {r}, additive reduction, on (p,q)=({c.p},{c.q})"
        )
    psi3 = _psi3(c, x)
    ord3 = frac_valuation(psi3, r) if psi3 else math.inf
    if ord3 >= 3 * ord2:
        return -ord2 / 3 * math.log(r)
    return -ord3 / 8 * math.log(r)


def canonical_height(c: Curve, pt: Point, pp: PrecisionPolicy = DEFAULT_POLICY) -> HeightBreakdown:
    if pt.is_identity:
        return HeightBreakdown(0.0, ((2, 0.0),), 0.0, 0.0)
    arch = archimedean_local_height(c, pt, pp)
    terms = []
    for r in bad_primes(c):
        lam = local_height_at_prime(c, pt, r)
        if lam != 0.0 or r == 2:
            terms.append((r, lam))
    e = math.isqrt(pt.x.denominator)
    for r in bad_primes(c):
        while e % r == 0:
            e //= r
    denom = math.log(e)
    total = arch + sum(lam for _, lam in terms) + denom
    return HeightBreakdown(arch, tuple(terms), denom, total)


def height(c: Curve, pt: Point, pp: PrecisionPolicy = DEFAULT_POLICY) -> float:
    return canonical_height(c, pt, pp).total


def canonical_height_oracle(c: Curve, pt: Point, n: int, max_bits: int = 1 << 22) -> float:
    """Half of naive_height(2^n pt) / 4^n, with exact rational doubling."""
    q = pt
    for _ in range(n):
        q = add(c, q, q)
        if not q.is_identity and q.x.denominator.bit_length() + abs(q.x.numerator).bit_length() > max_bits:
            raise CoordinateBudgetExceeded(f"2^{n} multiple exceeds {max_bits} bits")
    return 0.5 * naive_height(q) / 4**n


def height_pairing(c: Curve, pt1: Point, pt2: Point, pp: PrecisionPolicy = DEFAULT_POLICY) -> float:
    hs = height(c, add(c, pt1, pt2), pp)
    return (hs - height(c, pt1, pp) - height(c, pt2, pp)) / 2


def regulator(c: Curve, pt1: Point, pt2: Point, pp: PrecisionPolicy = DEFAULT_POLICY) -> float:
    h1, h2 = height(c, pt1, pp), height(c, pt2, pp)
    hs = height(c, add(c, pt1, pt2), pp)
    return h1 * h2 - (hs - h1 - h2) ** 2 / 4

