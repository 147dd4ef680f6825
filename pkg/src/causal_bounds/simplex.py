"""
Two-phase dense tableau simplex for ``min c @ x  s.t.  A @ x == b, x >= 0``.

Pivoting follows Bland's rule (lowest entering index, lowest leaving basis
index on ratio ties), which rules out cycling on the degenerate problems the
bounds LP produces.
"""
import logging
from typing import List, NamedTuple, Optional

import numpy as np

from .constants import FEASIBILITY_TOL, PIVOT_TOL

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


class LinearProgramResult(NamedTuple):
    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]
    phase1_residual: float
    pivots: int

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row, :] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r, :] -= tableau[r, col] * tableau[row, :]


def _entering(costs: np.ndarray, allowed: np.ndarray) -> int:
    candidates = np.flatnonzero((costs < -PIVOT_TOL) & allowed)
    return int(candidates[0]) if candidates.size else -1


def _leaving(tableau: np.ndarray, basis: List[int], col: int) -> int:
    best_row, best_ratio = -1, np.inf
    for r in range(len(basis)):
        a = tableau[r, col]
        if a > PIVOT_TOL:
            ratio = tableau[r, -1] / a
            if ratio < best_ratio - PIVOT_TOL or (
                abs(ratio - best_ratio) <= PIVOT_TOL and basis[r] < basis[best_row]
            ):
                best_row, best_ratio = r, ratio
    return best_row


def _run(
    tableau: np.ndarray, basis: List[int], allowed: np.ndarray, max_pivots: int
):
    """
    Minimize the objective held in the last row (reduced costs, with
    ``-objective`` in the corner).
    """
    pivots = 0
    while pivots < max_pivots:
        col = _entering(tableau[-1, :-1], allowed)
        if col == -1:
            return OPTIMAL, pivots
        row = _leaving(tableau, basis, col)
        if row == -1:
            return UNBOUNDED, pivots
        _pivot(tableau, row, col)
        basis[row] = col
        pivots += 1
    return ITERATION_LIMIT, pivots


def solve(
    c,
    a_eq,
    b_eq,
    feasibility_tol: float = FEASIBILITY_TOL,
    max_pivots: int = 10_000,
) -> LinearProgramResult:
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape

    negative = b < 0
    a[negative] *= -1
    b[negative] *= -1

    # phase 1: one artificial per row, minimize their sum
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = a
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, :] = -tableau[:m, :].sum(axis=0)
    tableau[-1, n : n + m] = 0.0
    basis = list(range(n, n + m))

    allowed = np.ones(n + m, dtype=bool)
    status, pivots = _run(tableau, basis, allowed, max_pivots)
    residual = float(-tableau[-1, -1])
    logger.debug("phase 1: %s after %d pivots, residual %.3e", status, pivots, residual)
    if status != OPTIMAL or residual > feasibility_tol:
        return LinearProgramResult(INFEASIBLE, None, None, residual, pivots)

    # drive remaining artificials out; rows where that is impossible are redundant
    keep_rows = []
    for r in range(m):
        if basis[r] >= n:
            cols = np.flatnonzero(np.abs(tableau[r, :n]) > PIVOT_TOL)
            if cols.size:
                _pivot(tableau, r, int(cols[0]))
                basis[r] = int(cols[0])
                pivots += 1
            else:
                continue
        keep_rows.append(r)

    # phase 2 on the original columns
    phase2 = np.zeros((len(keep_rows) + 1, n + 1))
    phase2[:-1, :n] = tableau[keep_rows, :n]
    phase2[:-1, -1] = tableau[keep_rows, -1]
    basis = [basis[r] for r in keep_rows]
    phase2[-1, :n] = c
    for r, col in enumerate(basis):
        if c[col] != 0.0:
            phase2[-1, :] -= c[col] * phase2[r, :]

    status, more = _run(phase2, basis, np.ones(n, dtype=bool), max_pivots)
    pivots += more
    logger.debug("phase 2: %s after %d pivots in total", status, pivots)
    if status != OPTIMAL:
        return LinearProgramResult(status, None, None, residual, pivots)

    x = np.zeros(n)
    for r, col in enumerate(basis):
        x[col] = phase2[r, -1]
    x[x < 0] = 0.0
    return LinearProgramResult(OPTIMAL, x, float(c @ x), residual, pivots)
