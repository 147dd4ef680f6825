"""
The canonical latent-variable model: a patient's latent state is one of
4 compliance types x 4 response types, each deterministically mapping
advice to decision and decision to outcome.
"""
import enum
import json
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from .exceptions import InvalidModel
from .trial import ObservedDistribution, TrialRecord, records_from_arrays

logger = logging.getLogger(__name__)

MODEL_SUM_TOL = 1e-12


class ComplianceType(enum.IntEnum):
    NEVER_TAKE = 0
    ALWAYS_TAKE = 1
    COMPLIER = 2
    DEFIER = 3


class ResponseType(enum.IntEnum):
    NEVER_RECOVER = 0
    ALWAYS_RECOVER = 1
    HELPED = 2
    HURT = 3


def decision(b: ComplianceType, z: int) -> int:
    if b == ComplianceType.NEVER_TAKE:
        return 0
    if b == ComplianceType.ALWAYS_TAKE:
        return 1
    if b == ComplianceType.COMPLIER:
        return z
    return 1 - z


def outcome(r: ResponseType, x: int) -> int:
    if r == ResponseType.NEVER_RECOVER:
        return 0
    if r == ResponseType.ALWAYS_RECOVER:
        return 1
    if r == ResponseType.HELPED:
        return x
    return 1 - x


# lookup tables for vectorized sampling: DECISION[b, z], OUTCOME[r, x]
DECISION = np.array([[decision(b, z) for z in (0, 1)] for b in ComplianceType])
OUTCOME = np.array([[outcome(r, x) for x in (0, 1)] for r in ResponseType])


@dataclass(frozen=True, eq=False)
class CanonicalModel:
    """
    Joint distribution ``q[b][r]`` over compliance type ``b`` and response
    type ``r``, plus the advice marginal ``pz``.
    """

    q: np.ndarray
    pz: float = 0.5

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.shape != (4, 4):
            raise InvalidModel(f"q must have shape (4, 4), got {q.shape}")
        if not np.all(np.isfinite(q)) or np.any(q < 0):
            raise InvalidModel("q entries must be finite and non-negative")
        if abs(q.sum() - 1.0) > MODEL_SUM_TOL:
            raise InvalidModel(f"q sums to {q.sum()!r}, expected 1")
        if not 0.0 <= self.pz <= 1.0:
            raise InvalidModel(f"pz = {self.pz!r} outside [0, 1]")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "pz", float(self.pz))

    @classmethod
    def point_mass(
        cls, b: ComplianceType, r: ResponseType, pz: float = 0.5
    ) -> "CanonicalModel":
        q = np.zeros((4, 4))
        q[b, r] = 1.0
        return cls(q, pz)

    @classmethod
    def uniform(cls, pz: float = 0.5) -> "CanonicalModel":
        return cls(np.full((4, 4), 1.0 / 16), pz)

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "pz": self.pz}

    @classmethod
    def from_dict(cls, data: dict) -> "CanonicalModel":
        try:
            return cls(np.asarray(data["q"], dtype=float), float(data.get("pz", 0.5)))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidModel):
                raise
            raise InvalidModel(f"malformed canonical model: {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def observation_matrix() -> np.ndarray:
    """
    The 8 x 16 0/1 matrix ``A`` with ``A @ q.ravel() == forward(q).p.ravel()``.

    Rows follow ``p[y][x][z]`` in C order, columns ``q[b][r]`` in C order.
    """
    a = np.zeros((2, 2, 2, 4, 4))
    for b in ComplianceType:
        for r in ResponseType:
            for z in (0, 1):
                x = decision(b, z)
                a[outcome(r, x), x, z, b, r] = 1.0
    return a.reshape(8, 16)


def ace_coefficients() -> np.ndarray:
    """Coefficients ``c`` over ``q.ravel()`` with ``ace(model) = c @ q``."""
    c = np.zeros((4, 4))
    c[:, ResponseType.HELPED] = 1.0
    c[:, ResponseType.HURT] = -1.0
    return c.ravel()


def forward(model: CanonicalModel) -> ObservedDistribution:
    p = (observation_matrix() @ model.q.ravel()).reshape(2, 2, 2)
    return ObservedDistribution(p, model.pz)


def ace(model: CanonicalModel) -> float:
    return float(
        model.q[:, ResponseType.HELPED].sum() - model.q[:, ResponseType.HURT].sum()
    )


def intervene(model: CanonicalModel, x: int) -> float:
    """P(y1 | do x)."""
    recovers = [r for r in ResponseType if outcome(r, x) == 1]
    return float(model.q[:, recovers].sum())


def sample(model: CanonicalModel, n: int, seed: int) -> List[TrialRecord]:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.random(n) < model.pz).astype(np.int64)
    cells = rng.choice(16, size=n, p=model.q.ravel())
    b, r = cells // 4, cells % 4
    x = DECISION[b, z]
    y = OUTCOME[r, x]
    return records_from_arrays(z, x, y)


def random_model(seed: int, pz: float = 0.5) -> CanonicalModel:
    """
    Uniform draw from the 16-cell simplex via normalized exponentials.
    """
    rng = np.random.default_rng(seed)
    weights = rng.exponential(size=(4, 4))
    return CanonicalModel(weights / weights.sum(), pz)
