import math
import random
from fractions import Fraction

import pytest

from mwbasis.curve import (
    IDENTITY,
    DomainError,
    Point,
    add,
    is_on_curve,
    negate,
    new_curve,
    reduce_mod,
    scalar_mul,
)
from mwbasis.ntutil import primes_between

PRIMES = primes_between(7, 200)


def test_new_curve_7_11(e7_11):
    c = e7_11
    assert (c.a, c.b, c.disc, c.c4, c.c6) == (-49, 121, 1204624, 2352, -104544)
    assert (c.b2, c.b4, c.b6, c.b8) == (0, -98, 484, -2401)


def test_new_curve_41_7(e41_7):
    assert e41_7.disc == 304005634192 == 16 * 19000352137
    assert e41_7.disc_prime == 19000352137


@pytest.mark.parametrize("p, q", [(4, 7), (7, 4), (5, 7), (7, 1), (9, 11)])
def test_new_curve_rejects(p, q):
    with pytest.raises(DomainError):
        new_curve(p, q)


@pytest.mark.parametrize("p, q", [(7, 11), (41, 7), (199, 83), (13, 13)])
def test_invariant_identities(p, q):
    c = new_curve(p, q)
    assert 1728 * c.disc == c.c4**3 - c.c6**2
    assert c.disc == 16 * (4 * p**6 - 27 * q**4)


def test_base_points_on_curve():
    for p in PRIMES[:10]:
        for q in PRIMES[:10]:
            c = new_curve(p, q)
            assert is_on_curve(c, c.P1) and is_on_curve(c, c.P2)
            assert not is_on_curve(c, Point.affine(1, 1)) or p == q
            assert is_on_curve(c, IDENTITY)


def test_negate(e7_11):
    assert negate(IDENTITY) is IDENTITY
    assert negate(e7_11.P1) == Point.affine(0, -11)
    assert negate(negate(e7_11.P2)) == e7_11.P2


def test_sum_of_base_points_is_p_minus_q():
    for p in PRIMES[:8]:
        for q in PRIMES[:8]:
            c = new_curve(p, q)
            assert add(c, c.P1, c.P2) == Point.affine(p, -q)


def test_identity_and_inverse(e41_7):
    c = e41_7
    assert add(c, c.P1, IDENTITY) == c.P1
    assert add(c, IDENTITY, c.P2) == c.P2
    assert add(c, c.P2, negate(c.P2)) is IDENTITY


def test_doubling_example(e7_11):
    # tangent slope at (0, 11) is -49/22
    assert scalar_mul(e7_11, 2, e7_11.P1) == Point(Fraction(2401, 484), Fraction(521, 10648))


def test_scalar_mul_edge_cases(e41_7):
    c = e41_7
    assert scalar_mul(c, 0, c.P1) is IDENTITY
    assert scalar_mul(c, -1, c.P1) == negate(c.P1)
    assert scalar_mul(c, 1, c.P2) == c.P2


def _random_multiple(c, rng):
    return add(c, scalar_mul(c, rng.randint(-3, 3), c.P1), scalar_mul(c, rng.randint(-3, 3), c.P2))


@pytest.mark.parametrize("p, q", [(41, 7), (7, 11)])
def test_group_law_fuzz(p, q):
    c = new_curve(p, q)
    rng = random.Random(p * 1000 + q)
    for _ in range(100):
        A, B, C = (_random_multiple(c, rng) for _ in range(3))
        assert add(c, add(c, A, B), C) == add(c, A, add(c, B, C))
        assert add(c, A, B) == add(c, B, A)
        assert is_on_curve(c, add(c, A, B))


def test_scalar_mul_is_linear(e41_7):
    c = e41_7
    mults = {n: scalar_mul(c, n, c.P2) for n in range(-20, 21)}
    for m in range(-10, 11):
        for n in range(-10, 11):
            assert mults[m + n] == add(c, mults[m], mults[n])


def test_denominator_structure(e41_7):
    c = e41_7
    for n in range(1, 9):
        for P in (scalar_mul(c, n, c.P1), scalar_mul(c, n, c.P2)):
            e = math.isqrt(P.x.denominator)
            assert e * e == P.x.denominator
            assert P.y.denominator == e**3


def test_reduce_mod(e41_7):
    c = e41_7
    assert reduce_mod(c, c.P1, 2).point_class == "nonsingular"
    info = reduce_mod(c, c.P2, 2)
    assert (info.kind, info.point_class, info.singular_locus) == ("bad", "singular", (1, 1))
    assert reduce_mod(c, c.P1, 3).kind == "good"
    # non-integral at 2 reduces to the identity
    assert reduce_mod(c, scalar_mul(c, 2, c.P1), 2).point_class == "nonsingular"


def test_reduce_mod_two_matches_partials():
    # in characteristic 2 singular means x odd (and hence y odd)
    for p in PRIMES[:6]:
        for q in PRIMES[:6]:
            c = new_curve(p, q)
            for n in range(1, 6):
                P = scalar_mul(c, n, c.P2)
                if P.x.denominator % 2 == 0:
                    continue
                x2 = P.x.numerator * pow(P.x.denominator, -1, 2) % 2
                assert (reduce_mod(c, P, 2).point_class == "singular") == (x2 == 1)
