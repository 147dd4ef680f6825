"""
Closed-form ACE bounds as linear forms over the 8 cells P(y, x | z).

A form is a coefficient tensor ``coeffs[y][x][z]`` plus a constant, so the
same object evaluates on observed probabilities and, in ``quantum``, on the
operators that produce them.
"""
from dataclasses import dataclass
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np

from .constants import DEFAULT_TOL
from .trial import ObservedDistribution, naive_effect

Cell = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class LinearForm:
    coeffs: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(2, 2, 2)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_terms(cls, terms: Dict[str, float], constant: float = 0.0):
        """
        ``terms`` maps ``"yxz"`` digit strings to coefficients, so
        ``{"110": 1}`` is +P(y1, x1 | z0).
        """
        coeffs = np.zeros((2, 2, 2))
        for key, value in terms.items():
            y, x, z = (int(ch) for ch in key)
            coeffs[y, x, z] += value
        return cls(coeffs, constant)

    def terms(self) -> Iterator[Tuple[Cell, float]]:
        for cell, value in np.ndenumerate(self.coeffs):
            if value != 0.0:
                yield cell, float(value)

    def evaluate(self, p) -> np.ndarray:
        """
        Evaluate on ``p`` of shape (..., 2, 2, 2); returns shape (...).
        """
        p = np.asarray(p, dtype=float)
        return np.tensordot(p, self.coeffs, axes=3) + self.constant

    def __call__(self, dist: ObservedDistribution) -> float:
        return float(self.evaluate(dist.p))

    def swap_y(self) -> "LinearForm":
        return LinearForm(self.coeffs[::-1, :, :], self.constant)

    def __neg__(self) -> "LinearForm":
        return LinearForm(-self.coeffs, -self.constant)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.coeffs + other.coeffs, self.constant + other.constant)

    def same_as(self, other: "LinearForm") -> bool:
        return bool(
            np.array_equal(self.coeffs, other.coeffs)
            and self.constant == other.constant
        )


LOWER_FORMS: Tuple[LinearForm, ...] = (
    LinearForm.from_terms({"111": 1, "000": 1}, -1),
    LinearForm.from_terms({"110": 1, "001": 1}, -1),
    LinearForm.from_terms({"110": 1, "111": -1, "101": -1, "010": -1, "100": -1}),
    LinearForm.from_terms({"111": 1, "110": -1, "100": -1, "011": -1, "101": -1}),
    LinearForm.from_terms({"011": -1, "101": -1}),
    LinearForm.from_terms({"010": -1, "100": -1}),
    LinearForm.from_terms({"001": 1, "011": -1, "101": -1, "010": -1, "000": -1}),
    LinearForm.from_terms({"000": 1, "010": -1, "100": -1, "011": -1, "001": -1}),
)


def upper_from_lower(form: LinearForm) -> LinearForm:
    """Substitute y1 <-> y0, then reverse every sign."""
    return -form.swap_y()


UPPER_FORMS: Tuple[LinearForm, ...] = tuple(upper_from_lower(f) for f in LOWER_FORMS)

# The upper list as published. Rows 3 and 4 end in -P(y0,x0|z0) where the
# y-swap/sign-reversal rule gives +P(y0,x0|z0); kept for diagnostics only.
PRINTED_UPPER_FORMS: Tuple[LinearForm, ...] = (
    LinearForm.from_terms({"011": -1, "100": -1}, 1),
    LinearForm.from_terms({"010": -1, "101": -1}, 1),
    LinearForm.from_terms({"010": -1, "011": 1, "001": 1, "110": 1, "000": -1}),
    LinearForm.from_terms({"011": -1, "111": 1, "001": 1, "010": 1, "000": -1}),
    LinearForm.from_terms({"111": 1, "001": 1}),
    LinearForm.from_terms({"110": 1, "000": 1}),
    LinearForm.from_terms({"101": -1, "111": 1, "001": 1, "110": 1, "100": 1}),
    LinearForm.from_terms({"100": -1, "110": 1, "000": 1, "111": 1, "101": 1}),
)

# P(y1|z1) - P(y1|z0) - P(y1,x0|z1) - P(y0,x1|z0)
NATURAL_LOWER_FORM = LinearForm.from_terms(
    {"111": 1, "101": 1, "110": -1, "100": -1}
) + LinearForm.from_terms({"101": -1, "010": -1})

# P(y1|z1) - P(y1|z0) + P(y0,x0|z1) + P(y1,x1|z0)
NATURAL_UPPER_FORM = LinearForm.from_terms(
    {"111": 1, "101": 1, "110": -1, "100": -1}
) + LinearForm.from_terms({"001": 1, "110": 1})

# group {1,2,5,6} survives quantum latent factors, {3,4,7,8} does not
QUANTUM_VALID_GROUP = (1, 2, 5, 6)
QUANTUM_VIOLABLE_GROUP = (3, 4, 7, 8)

# permutations of 1-based entry indices induced by relabeling the input
Z_SWAP_PERMUTATION = {1: 2, 2: 1, 3: 4, 4: 3, 5: 6, 6: 5, 7: 8, 8: 7}
XY_SWAP_PERMUTATION = {1: 2, 2: 1, 3: 8, 8: 3, 4: 7, 7: 4, 5: 5, 6: 6}


def natural_bounds(dist: ObservedDistribution) -> Tuple[float, float]:
    naive = naive_effect(dist)
    lower = naive - dist.cell(1, 0, 1) - dist.cell(0, 1, 0)
    upper = naive + dist.cell(0, 0, 1) + dist.cell(1, 1, 0)
    return lower, upper


def instrumental_lower(dist: ObservedDistribution) -> List[float]:
    return [form(dist) for form in LOWER_FORMS]


def instrumental_upper(dist: ObservedDistribution) -> List[float]:
    return [form(dist) for form in UPPER_FORMS]


def printed_upper(dist: ObservedDistribution) -> List[float]:
    return [form(dist) for form in PRINTED_UPPER_FORMS]


def feasibility_margin(dist: ObservedDistribution) -> float:
    """
    1 - max_x sum_y max_z P(y, x | z); negative means no classical model with
    the exclusion restriction reproduces ``dist``.
    """
    worst = max(dist.p[:, x, :].max(axis=1).sum() for x in (0, 1))
    return float(1.0 - worst)


class PrintedRowCheck(NamedTuple):
    index: int
    printed: float
    symmetric: float
    differs: bool
    consistent: bool


def printed_upper_diagnostic(
    dist: ObservedDistribution, tol: float = DEFAULT_TOL
) -> List[PrintedRowCheck]:
    """
    Compare the published upper rows against the symmetry-generated ones.

    A printed row is inconsistent when it lies below the best lower bound,
    which no valid upper bound can do on a classically feasible distribution.
    """
    best_lower = max(instrumental_lower(dist))
    checks = []
    for index, (printed, symmetric) in enumerate(
        zip(PRINTED_UPPER_FORMS, UPPER_FORMS), start=1
    ):
        printed_value = printed(dist)
        checks.append(
            PrintedRowCheck(
                index=index,
                printed=printed_value,
                symmetric=symmetric(dist),
                differs=not printed.same_as(symmetric),
                consistent=printed_value >= best_lower - tol,
            )
        )
    return checks
