"""
Observed trial data: per-patient records and the conditional distribution
P(y, x | z) a statistician estimates from them.

Arrays are indexed ``p[y][x][z]`` throughout the package.
"""
import csv
import io
import json
import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Union

import numpy as np

from .constants import CLAMP_TOL, DEFAULT_TOL, NORMALIZED_TOL
from .exceptions import EmptyArm, InvalidDistribution, InvalidRecord, ParseError

logger = logging.getLogger(__name__)

CSV_HEADER = ("z", "x", "y")


class _RecordFields(NamedTuple):
    z: int
    x: int
    y: int


class TrialRecord(_RecordFields):
    """
    One patient: advice ``z``, decision ``x`` (took the drug) and outcome
    ``y`` (recovered), each exactly 0 or 1.
    """

    __slots__ = ()

    def __new__(cls, z, x, y):
        for name, value in (("z", z), ("x", x), ("y", y)):
            if value not in (0, 1):
                raise InvalidRecord(f"{name} must be 0 or 1, got {value!r}")
        return super().__new__(cls, int(z), int(x), int(y))


@dataclass(frozen=True, eq=False)
class ObservedDistribution:
    """
    The 8 conditional probabilities P(y, x | z) plus the advice marginal
    ``pz`` = P(z=1).

    Entries in [-CLAMP_TOL, 0) are clamped to 0. A z-slice whose sum is
    within ``DEFAULT_TOL`` of 1 is renormalized, unless it is already 1 to a
    few ulp and nothing was clamped; anything further off is kept as given
    so that :func:`validate` can report it. Construction is idempotent.
    """

    p: np.ndarray
    pz: float = 0.5

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (2, 2, 2):
            raise InvalidDistribution(f"p must have shape (2, 2, 2), got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidDistribution("p contains non-finite entries")

        clamped = (p < 0) & (p >= -CLAMP_TOL)
        p[clamped] = 0.0
        for z in (0, 1):
            total = p[:, :, z].sum()
            drift = abs(total - 1.0)
            if total > 0 and drift <= DEFAULT_TOL:
                if drift > NORMALIZED_TOL or clamped[:, :, z].any():
                    p[:, :, z] /= total
        p.setflags(write=False)

        object.__setattr__(self, "p", p)
        object.__setattr__(self, "pz", float(self.pz))

    def cell(self, y: int, x: int, z: int) -> float:
        return float(self.p[y, x, z])

    def p_y1(self, z: int) -> float:
        """P(y=1 | z)."""
        return float(self.p[1, :, z].sum())

    def p_x1(self, z: int) -> float:
        """P(x=1 | z)."""
        return float(self.p[:, 1, z].sum())

    def swap_z(self) -> "ObservedDistribution":
        return ObservedDistribution(self.p[:, :, ::-1], 1.0 - self.pz)

    def swap_y(self) -> "ObservedDistribution":
        return ObservedDistribution(self.p[::-1, :, :], self.pz)

    def swap_xy(self) -> "ObservedDistribution":
        return ObservedDistribution(self.p[::-1, ::-1, :], self.pz)

    def to_dict(self) -> dict:
        return {"p": self.p.tolist(), "pz": self.pz}

    @classmethod
    def from_dict(cls, data: dict) -> "ObservedDistribution":
        try:
            return cls(np.asarray(data["p"], dtype=float), float(data.get("pz", 0.5)))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, InvalidDistribution):
                raise
            raise InvalidDistribution(f"malformed distribution: {e}") from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ObservedDistribution":
        return cls.from_dict(json.loads(text))


def uniform_distribution() -> ObservedDistribution:
    return ObservedDistribution(np.full((2, 2, 2), 0.25))


def _records_array(records: Iterable[Sequence[int]]) -> np.ndarray:
    arr = np.asarray(list(records), dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 3)
    return arr


def estimate(records: Iterable[TrialRecord]) -> ObservedDistribution:
    """
    Relative frequencies P(y, x | z) = count(y, x, z) / count(z).
    """
    arr = _records_array(records)
    z, x, y = arr[:, 0], arr[:, 1], arr[:, 2]
    counts = np.bincount(y * 4 + x * 2 + z, minlength=8).reshape(2, 2, 2)
    arm_sizes = counts.sum(axis=(0, 1))
    for arm in (0, 1):
        if arm_sizes[arm] == 0:
            raise EmptyArm(arm)

    logger.debug("estimating from %d records, arm sizes %s", len(arr), arm_sizes)
    return ObservedDistribution(counts / arm_sizes, arm_sizes[1] / len(arr))


def validate(dist: ObservedDistribution, tol: float = DEFAULT_TOL) -> List[str]:
    violations = []
    p = dist.p
    for z in (0, 1):
        total = p[:, :, z].sum()
        if abs(total - 1.0) > tol:
            violations.append(f"z={z} slice sums to {total!r}, expected 1")

    for (y, x, z), value in np.ndenumerate(p):
        if value < -tol or value > 1 + tol:
            violations.append(f"p[y={y}][x={x}][z={z}] = {value!r} outside [0, 1]")

    # redundant with the slice check, kept as a separate diagnostic
    decision_total = dist.p_x1(1) + p[:, 0, 1].sum()
    if abs(decision_total - 1.0) > tol:
        violations.append(
            f"P(x=1|z=1) + P(x=0|z=1) = {decision_total!r}, expected 1"
        )

    if not -tol <= dist.pz <= 1 + tol:
        violations.append(f"pz = {dist.pz!r} outside [0, 1]")
    return violations


def naive_effect(dist: ObservedDistribution) -> float:
    """P(y1|z1) - P(y1|z0)."""
    return dist.p_y1(1) - dist.p_y1(0)


def sample_distribution(
    dist: ObservedDistribution, n: int, seed: int
) -> List[TrialRecord]:
    """
    Draw z ~ Bernoulli(pz), then (y, x) from the z-slice of ``dist``.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.random(n) < dist.pz).astype(np.int64)

    # cumulative over the (y, x) cells of each slice, order y*2 + x
    slices = np.stack([dist.p[:, :, arm].ravel() for arm in (0, 1)])
    cdf = np.cumsum(slices, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(n)
    cell = np.empty(n, dtype=np.int64)
    for arm in (0, 1):
        mask = z == arm
        cell[mask] = np.searchsorted(cdf[arm], u[mask], side="right")
    y, x = cell // 2, cell % 2
    return records_from_arrays(z, x, y)


def records_from_arrays(z, x, y) -> List[TrialRecord]:
    rows = np.column_stack([z, x, y]).astype(np.int64).tolist()
    return list(map(TrialRecord._make, rows))


def read_records_csv(source: Union[str, io.TextIOBase]) -> List[TrialRecord]:
    """
    Parse ``z,x,y`` records. ``source`` is CSV text or an open text stream.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParseError(1, f"expected header {','.join(CSV_HEADER)}")

    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not field.strip() for field in row):
            continue
        if len(row) != 3:
            raise ParseError(line, f"expected 3 fields, got {len(row)}")
        values = [field.strip() for field in row]
        if any(value not in ("0", "1") for value in values):
            raise ParseError(line, f"fields must be 0 or 1, got {','.join(values)}")
        records.append(TrialRecord(*map(int, values)))
    return records


def write_records_csv(records: Iterable[TrialRecord], stream: io.TextIOBase) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(records)
