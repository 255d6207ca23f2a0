"""Closed-form height bounds, the index bound, and per-pair certificates.

A pair (p, q) is certified when the index v of span(P1, P2) in its
saturation is forced to 1: the index bound gives v < 3, the halving tests
give 2 does not divide v.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .curve import Curve, add, new_curve
from .descent import point_search, torsion_points, two_divisibility_report
from .heights import (
    DEFAULT_POLICY,
    HeightPrecisionError,
    PrecisionPolicy,
    UnsupportedLocalHeight,
    height,
)
from .ntutil import FactoringBudgetExceeded, factor

log = logging.getLogger(__name__)

GUARD = 1e-6
LOG2 = math.log(2)

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"
FLAGGED = "flagged"


def condition_check(p: int, q: int) -> bool:
    """p > 2 * 2**(1/4) * q, decided exactly as p**4 > 32 q**4."""
    return p**4 > 32 * q**4


@dataclass
class BoundReport:
    condition_ok: bool
    H: int
    UB1: float
    UB2: float
    LB: float
    lam: float
    v_bound: float
    v_lt_3: bool


def upper_bound_p1(p: int) -> float:
    return 0.5 * math.log(p) + math.log(2**11 * p**4) / 24


def upper_bound_p2(p: int) -> float:
    return 0.5 * math.log(p) + math.log(2**11 * p**4) / 6


def lower_bound(p: int) -> float:
    return math.log(p**4 / 2) / 8 - LOG2 / 3


def siksek_bound(regulator: float, lam: float) -> float:
    """Upper bound on the index for a rank-2 sublattice of regulator R."""
    if lam <= 0:
        raise ValueError(f"height threshold must be positive, got {lam}")
    return 2 / math.sqrt(3) * math.sqrt(regulator) / lam


def index_bound(report: BoundReport) -> float:
    v = siksek_bound(report.UB1 * report.UB2, report.LB)
    report.v_bound = v
    report.v_lt_3 = v < 3
    return v


def compute_bounds(p: int, q: int) -> BoundReport:
    lb = lower_bound(p)
    report = BoundReport(
        condition_ok=condition_check(p, q),
        H=max(4, 2 * p * p, 8 * q * q, p**4),
        UB1=upper_bound_p1(p),
        UB2=upper_bound_p2(p),
        LB=lb,
        lam=lb,
        v_bound=math.nan,
        v_lt_3=False,
    )
    index_bound(report)
    return report


@dataclass
class Certificate:
    p: int
    q: int
    condition: bool
    delta: int
    delta_prime: int
    delta_prime_squarefree: Optional[bool] = None
    minimal: Optional[bool] = None
    torsion_order: Optional[int] = None
    h_p1: Optional[float] = None
    h_p2: Optional[float] = None
    h_sum: Optional[float] = None
    regulator: Optional[float] = None
    H: int = 0
    ub1: float = math.nan
    ub2: float = math.nan
    lb: float = math.nan
    v_bound: float = math.nan
    v_bound_sharp: Optional[float] = None
    two_div: Optional[dict] = None
    searched_points: Optional[int] = None
    searched_min_height: Optional[float] = None
    flags: list = field(default_factory=list)
    verdict: str = FLAGGED

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, float):
                d[k] = float(f"{v:.12g}")
        return d


def conformance_failures(cert: Certificate | dict) -> list[str]:
    """Names of failed height/bound checks, read from recorded values only."""
    c = cert if isinstance(cert, dict) else asdict(cert)
    need = ("h_p1", "h_p2", "h_sum", "regulator")
    if any(c[k] is None for k in need):
        return ["heights_missing"]
    out = []
    if c["h_p1"] > c["ub1"] + GUARD:
        out.append("h_p1_above_ub1")
    if c["h_p2"] > c["ub2"] + GUARD:
        out.append("h_p2_above_ub2")
    if c["searched_min_height"] is not None and c["searched_min_height"] <= c["lb"] - GUARD:
        out.append("searched_point_below_lb")
    if c["regulator"] <= GUARD:
        out.append("regulator_not_positive")
    if not c["regulator"] < c["h_p1"] * c["h_p2"]:
        out.append("regulator_not_below_product")
    return out


def decide_verdict(cert: Certificate | dict) -> str:
    """Verdict from a certificate's recorded fields; works on parsed JSON."""
    c = cert if isinstance(cert, dict) else asdict(cert)
    if not c["condition"]:
        return NOT_APPLICABLE
    if c["flags"]:
        return FLAGGED
    td = c["two_div"]
    if (
        not c["delta_prime_squarefree"]
        or not c["minimal"]
        or c["torsion_order"] != 1
        or td is None
        or td["p1"]
        or td["p2"]
        or td["sum"]
        or conformance_failures(c)
    ):
        return FLAGGED
    if not c["v_bound"] < 3:
        return INCONCLUSIVE
    return CERTIFIED


def _fill(cert: Certificate, c: Curve, pp: PrecisionPolicy, search_bound: int, search_denom: int) -> None:
    fac = factor(abs(c.disc_prime))
    cert.delta_prime_squarefree = all(e == 1 for _, e in fac)
    # disc = 2^4 disc' with disc' odd
    ords = [e + (4 if r == 2 else 0) for r, e in fac]
    cert.minimal = all(e < 12 for e in ords) and c.disc_prime % 2 == 1
    if not cert.delta_prime_squarefree:
        squares = "*".join(f"{r}^{e}" for r, e in fac if e > 1)
        cert.flags.append(f"delta_prime_not_squarefree: {squares}")
    cert.torsion_order = len(torsion_points(c))
    s = add(c, c.P1, c.P2)
    h1, h2, hs = (height(c, P, pp) for P in (c.P1, c.P2, s))
    cert.h_p1, cert.h_p2, cert.h_sum = h1, h2, hs
    cert.regulator = h1 * h2 - (hs - h1 - h2) ** 2 / 4
    if cert.regulator > 0:
        cert.v_bound_sharp = siksek_bound(cert.regulator, cert.lb)
    report = two_divisibility_report(c)
    cert.two_div = {"p1": report.p1_halvable, "p2": report.p2_halvable, "sum": report.sum_halvable}
    pts = [P for P in point_search(c, search_bound, search_denom) if not P.is_identity]
    cert.searched_points = len(pts)
    if pts:
        cert.searched_min_height = min(height(c, P, pp) for P in pts)


def certify_pair(
    p: int,
    q: int,
    pp: PrecisionPolicy = DEFAULT_POLICY,
    search_bound: int = 10_000,
    search_denom: int = 10,
) -> Certificate:
    """Run the full verification pipeline for one pair; never raises on data."""
    c = new_curve(p, q)
    bounds = compute_bounds(p, q)
    cert = Certificate(
        p=p,
        q=q,
        condition=bounds.condition_ok,
        delta=c.disc,
        delta_prime=c.disc_prime,
        H=bounds.H,
        ub1=bounds.UB1,
        ub2=bounds.UB2,
        lb=bounds.LB,
        v_bound=bounds.v_bound,
    )
    try:
        _fill(cert, c, pp, search_bound, search_denom)
    except FactoringBudgetExceeded as exc:
        cert.flags.append(f"factoring_budget: {exc}")
    except UnsupportedLocalHeight as exc:
        cert.flags.append(f"unsupported_local_height: {exc}")
    except HeightPrecisionError as exc:
        cert.flags.append(f"height_precision: {exc}")
    cert.verdict = decide_verdict(cert)
    log.debug("(%d, %d) -> %s", p, q, cert.verdict)
    return cert
