"""Halving, torsion and small-point search on E_(p,q)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import mpmath
import numpy as np

from .curve import IDENTITY, Curve, Point, add, is_on_curve
from .ntutil import FactoringBudgetExceeded, divisors, factor, is_prime

# rational-root candidates are enumerated from divisors only below this size
DIVISOR_SEARCH_LIMIT = 10**24
MAZUR_BOUND = 12


def _fraction_sqrt(v: Fraction):
    if v < 0:
        return None
    rn, rd = math.isqrt(v.numerator), math.isqrt(v.denominator)
    if rn * rn == v.numerator and rd * rd == v.denominator:
        return Fraction(rn, rd)
    return None


def _poly_eval(coeffs, x):
    acc = 0
    for a in coeffs:
        acc = acc * x + a
    return acc


def _deflate(coeffs):
    # strip the factor X^k; return (coeffs, had_zero_root)
    coeffs = list(coeffs)
    zero = False
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
        zero = True
    return coeffs, zero


def _roots_by_divisors(coeffs: list[int]) -> set[Fraction]:
    lead, const = coeffs[0], coeffs[-1]
    found = set()
    for s in divisors(lead):
        for r in divisors(const):
            for cand in (Fraction(r, s), Fraction(-r, s)):
                if _poly_eval(coeffs, cand) == 0:
                    found.add(cand)
    return found


def _roots_by_approximation(coeffs: list[int]) -> set[Fraction]:
    """Rational roots via high-precision real roots and denominator bounds.

    A rational root r/s has s | lead; two distinct fractions with
    denominators <= |lead| differ by at least 1/lead^2, so an approximation
    closer than 1/(2 lead^2) pins the candidate, which is then checked exactly.
    """
    lead = abs(coeffs[0])
    scale = max(abs(a) for a in coeffs)
    bits = 4 * lead.bit_length() + 2 * scale.bit_length() + 128
    found = set()
    with mpmath.workprec(bits):
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=bits)
        for z in roots:
            if abs(mpmath.im(z)) > mpmath.mpf(2) ** (-bits // 4):
                continue
            re = mpmath.re(z)
            man, exp = re.man_exp  # unsigned mantissa
            approx = Fraction(int(man) * (-1 if re < 0 else 1)) * Fraction(2) ** int(exp)
            cand = approx.limit_denominator(lead)
            if _poly_eval(coeffs, cand) == 0:
                found.add(cand)
    return found


def rational_roots(coeffs: list[int]) -> list[Fraction]:
    """Distinct rational roots of an integer polynomial (highest degree first)."""
    coeffs, zero = _deflate(coeffs)
    found = {Fraction(0)} if zero else set()
    if len(coeffs) > 1:
        g = reduce(math.gcd, coeffs)
        coeffs = [a // g for a in coeffs]
        if abs(coeffs[0] * coeffs[-1]) <= DIVISOR_SEARCH_LIMIT:
            try:
                found |= _roots_by_divisors(coeffs)
                return sorted(found)
            except FactoringBudgetExceeded:
                pass
        found |= _roots_by_approximation(coeffs)
    return sorted(found)


def rational_two_torsion(c: Curve) -> list[Point]:
    return [Point(x, Fraction(0)) for x in rational_roots([1, 0, c.a, c.b])]


def halving_preimages(c: Curve, pt: Point) -> list[Point]:
    """All rational Q with 2Q = pt.

    x(Q) is a root of F(X) - 4 x(pt) (X^3 + a X + b), F the duplication
    numerator X^4 - b4 X^2 - 2 b6 X - b8.
    """
    if pt.is_identity:
        return [IDENTITY] + rational_two_torsion(c)
    u, v = pt.x.numerator, pt.x.denominator
    quartic = [v, -4 * u, -c.b4 * v, -2 * c.b6 * v - 4 * c.a * u, -c.b8 * v - 4 * c.b * u]
    out = []
    for X in rational_roots(quartic):
        Y = _fraction_sqrt(c.rhs(X))
        if Y is None:
            continue
        for cand in {Point(X, Y), Point(X, -Y)}:
            if add(c, cand, cand) == pt:
                out.append(cand)
    return sorted(out, key=lambda P: (P.x, P.y))


@dataclass
class TwoDivisibilityReport:
    p1_halvable: bool
    p2_halvable: bool
    sum_halvable: bool
    witnesses: list = field(default_factory=list)

    @property
    def any_halvable(self) -> bool:
        return self.p1_halvable or self.p2_halvable or self.sum_halvable


def two_divisibility_report(c: Curve) -> TwoDivisibilityReport:
    """Halving tests for P1, P2 and P1 + P2.

    If none of the three is twice a rational point and there is no rational
    2-torsion, span(P1, P2) has odd index in its saturation.
    """
    s = add(c, c.P1, c.P2)
    if s != Point.affine(c.p, -c.q):
        raise AssertionError(f"group law disagrees: P1 + P2 = {s}")
    flags, witnesses = [], []
    for pt in (c.P1, c.P2, s):
        halves = halving_preimages(c, pt)
        flags.append(bool(halves))
        witnesses += [(pt, h) for h in halves]
    return TwoDivisibilityReport(*flags, witnesses=witnesses)


def count_points_mod(c: Curve, ell: int) -> int:
    """#E(F_ell) for a prime ell of good reduction, by counting residue pairs."""
    squares = [0] * ell
    for y in range(ell):
        squares[y * y % ell] += 1
    a, b = c.a % ell, c.b % ell
    return 1 + sum(squares[(x * x * x + a * x + b) % ell] for x in range(ell))


def good_primes(c: Curve, count: int = 5, limit: int = 50) -> list[int]:
    out = [ell for ell in range(3, limit + 1) if is_prime(ell) and c.disc % ell]
    return out[:count]


def torsion_bound(c: Curve) -> int:
    return reduce(math.gcd, (count_points_mod(c, ell) for ell in good_primes(c)))


def _point_order(c: Curve, pt: Point, limit: int = MAZUR_BOUND):
    acc = pt
    for n in range(1, limit + 1):
        if acc.is_identity:
            return n
        acc = add(c, acc, pt)
    return None


def torsion_points(c: Curve) -> list[Point]:
    """Rational torsion, via point counts then a Lutz-Nagell enumeration."""
    if torsion_bound(c) == 1:
        return [IDENTITY]
    ys = {0}
    for d in divisors(abs(c.disc)):
        r = math.isqrt(d)
        if r * r == d:
            ys.add(r)
    found = [IDENTITY]
    for y in sorted(ys):
        for x in rational_roots([1, 0, c.a, c.b - y * y]):
            if x.denominator != 1:
                continue
            for pt in {Point(x, Fraction(y)), Point(x, Fraction(-y))}:
                if _point_order(c, pt) is not None:
                    found.append(pt)
    return found


def torsion_order(c: Curve) -> int:
    return len(torsion_points(c))


def point_search(c: Curve, max_numerator: int, max_denom_root: int) -> list[Point]:
    """Points with x = m/e^2, |m| <= max_numerator, 1 <= e <= max_denom_root.

    Output is sorted by (e, m, sign of y).
    """
    p2, q2 = c.p * c.p, c.q * c.q
    ms = np.arange(-max_numerator, max_numerator + 1, dtype=np.int64)
    found = []
    for e in range(1, max_denom_root + 1):
        e2, e4, e6 = e * e, e**4, e**6
        peak = max_numerator**3 + p2 * max_numerator * e4 + q2 * e6
        if peak < 2**61:
            cand = ms if e == 1 else ms[np.gcd(ms, e) == 1]
            vals = cand**3 - p2 * e4 * cand + q2 * e6
            keep = vals >= 0
            cand, vals = cand[keep], vals[keep]
            root = np.floor(np.sqrt(vals.astype(np.float64))).astype(np.int64)
            hit = np.zeros(len(vals), dtype=bool)
            for d in (-1, 0, 1):
                r = root + d
                hit |= (r >= 0) & (r * r == vals)
            hits = [int(m) for m in cand[hit]]
        else:
            hits = []
            for m in range(-max_numerator, max_numerator + 1):
                if e > 1 and math.gcd(m, e) != 1:
                    continue
                val = m**3 - p2 * e4 * m + q2 * e6
                if val >= 0 and math.isqrt(val) ** 2 == val:
                    hits.append(m)
        for m in hits:
            k = math.isqrt(m**3 - p2 * e4 * m + q2 * e6)
            x = Fraction(m, e2)
            ys = [Fraction(0)] if k == 0 else [Fraction(-k, e**3), Fraction(k, e**3)]
            found += [(e, m, 0 if y == 0 else (1 if y > 0 else -1), Point(x, y)) for y in ys]
    found.sort(key=lambda t: t[:3])
    pts = [t[3] for t in found]
    assert all(is_on_curve(c, P) for P in pts)
    return pts

