import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

from .classical import ace_coefficients, observation_matrix
from .constants import DEFAULT_TOL, FEASIBILITY_TOL
from .inequalities import (
    feasibility_margin,
    instrumental_lower,
    instrumental_upper,
    natural_bounds,
    printed_upper_diagnostic,
)
from .simplex import solve
from .trial import ObservedDistribution

logger = logging.getLogger(__name__)

LOWER = "lower"
UPPER = "upper"


class Violation(NamedTuple):
    side: str
    index: int
    value: float

    def to_dict(self) -> dict:
        return {"side": self.side, "index": self.index, "value": self.value}


class TightBounds(NamedTuple):
    lower: Optional[float]
    upper: Optional[float]
    feasible: bool


@dataclass(frozen=True)
class BoundsReport:
    """
    ``lp_lower``/``lp_upper`` are ``None`` when no classical model
    reproduces the distribution.
    """

    natural_lower: float
    natural_upper: float
    inst_lower: Tuple[float, ...]
    inst_upper: Tuple[float, ...]
    lp_lower: Optional[float]
    lp_upper: Optional[float]
    feasible: bool
    feasibility_margin: float = 0.0
    violations: Tuple[Violation, ...] = field(default=())

    @property
    def best_lower(self) -> float:
        return max(self.inst_lower)

    @property
    def best_upper(self) -> float:
        return min(self.inst_upper)

    def to_dict(self) -> dict:
        return {
            "natural_lower": self.natural_lower,
            "natural_upper": self.natural_upper,
            "inst_lower": list(self.inst_lower),
            "inst_upper": list(self.inst_upper),
            "lp_lower": self.lp_lower,
            "lp_upper": self.lp_upper,
            "feasible": self.feasible,
            "feasibility_margin": self.feasibility_margin,
            "violations": [v.to_dict() for v in self.violations],
        }


def tight_bounds_lp(
    dist: ObservedDistribution, feasibility_tol: float = FEASIBILITY_TOL
) -> TightBounds:
    """
    Minimize and maximize the ACE over all canonical models whose forward
    image equals ``dist``.
    """
    a_eq = observation_matrix()
    b_eq = dist.p.ravel()
    c = ace_coefficients()

    low = solve(c, a_eq, b_eq, feasibility_tol=feasibility_tol)
    if not low.is_optimal:
        logger.debug("LP %s, residual %.3e", low.status, low.phase1_residual)
        return TightBounds(None, None, False)
    high = solve(-c, a_eq, b_eq, feasibility_tol=feasibility_tol)
    if not high.is_optimal:
        return TightBounds(None, None, False)
    return TightBounds(low.objective, -high.objective, True)


def find_violations(
    inst_lower, inst_upper, true_ace: float, tol: float = DEFAULT_TOL
) -> List[Violation]:
    violations = [
        Violation(LOWER, i, value)
        for i, value in enumerate(inst_lower, start=1)
        if value > true_ace + tol
    ]
    violations += [
        Violation(UPPER, i, value)
        for i, value in enumerate(inst_upper, start=1)
        if value < true_ace - tol
    ]
    return violations


def full_report(
    dist: ObservedDistribution,
    true_ace: Optional[float] = None,
    tol: float = DEFAULT_TOL,
) -> BoundsReport:
    natural_lower, natural_upper = natural_bounds(dist)
    inst_lower = tuple(instrumental_lower(dist))
    inst_upper = tuple(instrumental_upper(dist))
    lp = tight_bounds_lp(dist)

    violations: Tuple[Violation, ...] = ()
    if true_ace is not None:
        violations = tuple(find_violations(inst_lower, inst_upper, true_ace, tol))
        for v in violations:
            logger.info("%s bound %d = %.6f violated by ACE %.6f", *v, true_ace)

    return BoundsReport(
        natural_lower=natural_lower,
        natural_upper=natural_upper,
        inst_lower=inst_lower,
        inst_upper=inst_upper,
        lp_lower=lp.lower,
        lp_upper=lp.upper,
        feasible=lp.feasible,
        feasibility_margin=feasibility_margin(dist),
        violations=violations,
    )


def printed_rows_report(dist: ObservedDistribution, tol: float = DEFAULT_TOL) -> dict:
    checks = printed_upper_diagnostic(dist, tol)
    return {
        "rows": [check._asdict() for check in checks],
        "inconsistent": [check.index for check in checks if not check.consistent],
    }
