"""Certify that (0, q) and (-p, q) extend to a Mordell-Weil basis of
y^2 = x^3 - p^2 x + q^2 for primes p, q > 5."""

from .bounds import BoundReport, Certificate, certify_pair, compute_bounds, condition_check, index_bound
from .curve import IDENTITY, Curve, Point, add, is_on_curve, negate, new_curve, reduce_mod, scalar_mul
from .heights import (
    HeightBreakdown,
    PrecisionPolicy,
    canonical_height,
    canonical_height_oracle,
    height_pairing,
    naive_height,
    regulator,
)

__version__ = "0.1.0"
