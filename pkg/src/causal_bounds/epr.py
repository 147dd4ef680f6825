"""
EPR toy model: a polarization-entangled photon pair whose left half carries
the decision and whose right half carries the recovery.

Angles are in degrees at every interface.
"""
import itertools
import logging
import math
from typing import List, NamedTuple, Tuple

import numpy as np

from .inequalities import LOWER_FORMS
from .operators import DensityState, Instrument, KrausMap, identity
from .quantum import QuantumLatentModel, structured_model
from .trial import ObservedDistribution

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
A_PLUS = (1 + 1 / SQRT2) / 4
A_MINUS = (1 - 1 / SQRT2) / 4
PUBLISHED_VIOLATION = (5 / SQRT2 - 3) / 4
TSIRELSON = 2 * SQRT2
CLASSICAL_CHSH_BOUND = 2.0
# optimum of lower bound 3 over all toy angle sets
TOY_OPTIMUM = (3 * math.sqrt(6.0) - 6) / 8


class PolarizerAngles(NamedTuple):
    """
    ``alpha_l`` is the left filter under advice z_l, ``beta_k`` the right
    filter under drug status x_k.
    """

    alpha0: float
    alpha1: float
    beta0: float
    beta1: float

    @classmethod
    def parse(cls, text: str) -> "PolarizerAngles":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated angles, got {text!r}")
        values = [float(p) for p in parts]
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"angles must be finite, got {text!r}")
        return cls(*values)

    def alpha(self, z: int) -> float:
        return self.alpha1 if z else self.alpha0

    def beta(self, x: int) -> float:
        return self.beta1 if x else self.beta0

    def __str__(self) -> str:
        return ",".join(f"{a:g}" for a in self)


PUBLISHED_ANGLES = PolarizerAngles(alpha0=67.5, alpha1=22.5, beta0=-45.0, beta1=0.0)
CHSH_ANGLES = PolarizerAngles(alpha0=0.0, alpha1=45.0, beta0=22.5, beta1=-22.5)


class ChshResult(NamedTuple):
    covariances: Tuple[Tuple[float, float], Tuple[float, float]]
    s_value: float

    @property
    def exceeds_classical(self) -> bool:
        return abs(self.s_value) > CLASSICAL_CHSH_BOUND + 1e-9

    def to_dict(self) -> dict:
        return {
            "covariances": [list(row) for row in self.covariances],
            "s_value": self.s_value,
            "exceeds_classical": self.exceeds_classical,
        }


class SecondDrugExperiment(NamedTuple):
    # table[z][w][x][y] = P(x, y | z, w)
    table: np.ndarray
    chsh: ChshResult

    @property
    def classical_bound_exceeded(self) -> bool:
        return self.chsh.exceeds_classical


def _rotation(angle_deg: float) -> np.ndarray:
    t = math.radians(angle_deg)
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]], dtype=np.complex128)


def singlet_state() -> DensityState:
    """(|hv> - |vh>) / sqrt 2."""
    return DensityState.pure(np.array([0.0, 1.0, -1.0, 0.0]))


def projector(angle_deg: float, outcome: int) -> np.ndarray:
    """
    Outcome 1 passes the filter at ``angle_deg`` (projector onto
    cos a |h> + sin a |v>), outcome 0 is blocked.
    """
    t = math.radians(angle_deg)
    v = np.array([math.cos(t), math.sin(t)], dtype=np.complex128)
    passed = np.outer(v, v)
    return passed if outcome else identity(2) - passed


def coincidence_probability(alpha_deg, beta_deg):
    """Both filters pass or both block: (1 - cos(2a - 2b)) / 2."""
    return (1 - np.cos(2 * np.radians(np.subtract(alpha_deg, beta_deg)))) / 2


def covariance(alpha_deg, beta_deg):
    """P(coincide) - P(differ) with outcomes coded +1 pass, -1 blocked."""
    return -np.cos(2 * np.radians(np.subtract(alpha_deg, beta_deg)))


def toy_cells(alpha0, alpha1, beta0, beta1) -> np.ndarray:
    """
    P(y, x | z) = (1 - (-1)^(y+x) cos(2 alpha_z - 2 beta_x)) / 4, broadcast
    over array-valued angles; returns shape (..., 2, 2, 2).
    """
    alphas = (alpha0, alpha1)
    betas = (beta0, beta1)
    shape = np.broadcast(alpha0, alpha1, beta0, beta1).shape
    p = np.empty(shape + (2, 2, 2))
    for y, x, z in itertools.product((0, 1), repeat=3):
        sign = 1 if (y + x) % 2 == 0 else -1
        p[..., y, x, z] = (1 - sign * np.cos(2 * np.radians(np.subtract(alphas[z], betas[x])))) / 4
    return p


def toy_distribution(angles: PolarizerAngles) -> ObservedDistribution:
    return ObservedDistribution(toy_cells(*angles), 0.5)


def toy_embedding(angles: PolarizerAngles) -> QuantumLatentModel:
    """
    Structured model with G_j D_k(m_l) = P(alpha_j, k) (x) P(beta_l, pass):
    advice rotates the left filter frame, the decision is the left filter in
    its reference frame, the drug rotates the right frame and recovery is the
    right filter passing.
    """
    g0 = KrausMap.conjugation(_rotation(-angles.alpha0))
    g1 = KrausMap.conjugation(_rotation(-angles.alpha1))
    decision = Instrument.projective(projector(0.0, 1))
    e0 = KrausMap.conjugation(_rotation(-angles.beta0))
    e1 = KrausMap.conjugation(_rotation(-angles.beta1))
    return structured_model(singlet_state(), g0, g1, decision, e0, e1, projector(0.0, 1))


def chsh_from_covariances(covariances) -> ChshResult:
    c = tuple(tuple(float(v) for v in row) for row in covariances)
    s = c[0][0] + c[0][1] + c[1][0] - c[1][1]
    return ChshResult(c, s)


def chsh(angles: PolarizerAngles) -> ChshResult:
    """C(a0,b0) + C(a0,b1) + C(a1,b0) - C(a1,b1)."""
    return chsh_from_covariances(
        [[covariance(angles.alpha(i), angles.beta(j)) for j in (0, 1)] for i in (0, 1)]
    )


def second_experiment(angles: PolarizerAngles) -> SecondDrugExperiment:
    """
    Advice z sets the left filter to alpha_z, the second drug w sets the right
    filter to beta_w; x and y are the two filter results.
    """
    table = np.empty((2, 2, 2, 2))
    for z, w, x, y in itertools.product((0, 1), repeat=4):
        sign = 1 if (x + y) % 2 == 0 else -1
        c = math.cos(2 * math.radians(angles.alpha(z) - angles.beta(w)))
        table[z, w, x, y] = (1 - sign * c) / 4

    code = np.array([-1.0, 1.0])
    covariances = [
        [float(code @ table[z, w] @ code) for w in (0, 1)] for z in (0, 1)
    ]
    return SecondDrugExperiment(table, chsh_from_covariances(covariances))


def local_strategy_chsh_values() -> List[float]:
    """
    CHSH values of the 16 deterministic local assignments
    (a0, a1, b0, b1) in {-1, +1}^4.
    """
    values = []
    for a0, a1, b0, b1 in itertools.product((-1, 1), repeat=4):
        values.append(float(a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1))
    return values


class ScanResult(NamedTuple):
    angles: PolarizerAngles
    violation: float


def _grid(step: float) -> np.ndarray:
    count = int(math.floor(180.0 / step + 1e-9))
    grid = step * np.arange(count)
    return grid[grid < 180.0 - 1e-9]


def scan_rows(grid_step_deg: float):
    """
    Yield ``(angles, violation)`` for every grid point, beta1 fixed at 0.
    """
    grid = _grid(grid_step_deg)
    third = LOWER_FORMS[2]
    a1, b0 = np.meshgrid(grid, grid, indexing="ij")
    for a0 in grid:
        values = third.evaluate(toy_cells(a0, a1, b0, 0.0))
        for (i, j), value in np.ndenumerate(values):
            yield PolarizerAngles(float(a0), float(grid[i]), float(grid[j]), 0.0), float(value)


def scan_max_violation(grid_step_deg: float) -> ScanResult:
    """
    Grid search for the largest excess of lower bound 3 over the true ACE on
    the toy family.

    Every toy embedding has ACE 0 (its right marginal is maximally mixed), and
    the objective only depends on angle differences, so beta1 is pinned to 0
    and (alpha0, alpha1, beta0) run over the grid on [0, 180). The first
    maximum in lexicographic order wins.
    """
    if not 0 < grid_step_deg <= 45:
        raise ValueError(f"grid step must be in (0, 45], got {grid_step_deg}")
    grid = _grid(grid_step_deg)
    third = LOWER_FORMS[2]
    a1, b0 = np.meshgrid(grid, grid, indexing="ij")

    best_value, best_angles = -np.inf, None
    for a0 in grid:
        values = third.evaluate(toy_cells(a0, a1, b0, 0.0))
        flat = int(np.argmax(values))
        if values.flat[flat] > best_value:
            i, j = np.unravel_index(flat, values.shape)
            best_value = float(values.flat[flat])
            best_angles = PolarizerAngles(float(a0), float(grid[i]), float(grid[j]), 0.0)

    logger.debug("scan step %g over %d^3 points: %.6f at %s", grid_step_deg, len(grid), best_value, best_angles)
    return ScanResult(best_angles, best_value)
