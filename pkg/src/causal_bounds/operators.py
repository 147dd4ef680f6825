"""
Finite-dimensional operator algebra in the observable (Heisenberg) picture.

Matrices are plain complex ``numpy`` arrays. Maps act on observables as
``phi(a) = sum_i K_i^dagger a K_i``; states are density matrices evaluated
as ``rho(a) = trace(rho @ a)``.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .constants import (
    HERMITIAN_TOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
    PSD_TOL,
    TRACE_TOL,
    UNITAL_TOL,
)
from .exceptions import DimMismatch, InvalidOperator, NotHermitian

logger = logging.getLogger(__name__)


def as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidOperator("matrix has non-finite entries")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product, first factor outer."""
    return np.kron(as_matrix(a), as_matrix(b))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def _jacobi_rotate(h: np.ndarray, p: int, q: int) -> None:
    """Zero ``h[p, q]`` in place with a complex Jacobi rotation."""
    r = abs(h[p, q])
    phase = h[p, q] / r
    theta = 0.5 * math.atan2(2.0 * r, (h[q, q] - h[p, p]).real)
    c, s = math.cos(theta), math.sin(theta)
    # block = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    block = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
    idx = [p, q]
    h[:, idx] = h[:, idx] @ block
    h[idx, :] = dagger(block) @ h[idx, :]
    h[p, q] = h[q, p] = 0.0
    h[p, p] = h[p, p].real
    h[q, q] = h[q, q].real


def jacobi_eigenvalues(
    h, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> np.ndarray:
    """
    Eigenvalues of a Hermitian matrix by cyclic Jacobi sweeps, ascending.
    """
    h = as_matrix(h)
    if not is_hermitian(h):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = 0.5 * (h + dagger(h))
    n = h.shape[0]
    threshold = tol * max(1.0, float(np.linalg.norm(h)))

    # entries at or below this are left alone; n^2 of them stay under threshold
    skip = threshold / n
    for sweep in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.abs(h - np.diag(np.diag(h))) ** 2)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(h[p, q]) > skip:
                    _jacobi_rotate(h, p, q)
    else:
        logger.warning("Jacobi did not converge in %d sweeps", max_sweeps)

    return np.sort(np.diag(h).real)


def min_eigenvalue(h, tol: float = JACOBI_TOL) -> float:
    return float(jacobi_eigenvalues(h, tol=tol)[0])


def max_eigenvalue(h, tol: float = JACOBI_TOL) -> float:
    return float(jacobi_eigenvalues(h, tol=tol)[-1])


def partial_trace_a(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the first tensor factor."""
    return np.einsum("ijik->jk", rho.reshape(dim_a, dim_b, dim_a, dim_b))


def partial_trace_b(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the second tensor factor."""
    return np.einsum("ijkj->ik", rho.reshape(dim_a, dim_b, dim_a, dim_b))


@dataclass(frozen=True, eq=False)
class DensityState:
    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho)
        if not is_hermitian(rho):
            raise NotHermitian("density matrix is not Hermitian")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidOperator(f"density matrix has trace {trace!r}")
        if min_eigenvalue(rho) < -PSD_TOL:
            raise InvalidOperator("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityState":
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityState":
        return cls(identity(dim) / dim)

    def __call__(self, a) -> float:
        """rho(a) for Hermitian ``a``; the imaginary part is dropped."""
        return expectation(self, a).real


def expectation(state: DensityState, a) -> complex:
    a = np.asarray(a)
    if a.shape != state.rho.shape:
        raise DimMismatch(f"state has dim {state.dim}, observable {a.shape}")
    return complex(np.einsum("ij,ji->", state.rho, a))


@dataclass(frozen=True, eq=False)
class Effect:
    """A yes-no observable ``0 <= m <= 1``."""

    m: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.m)
        if not is_hermitian(m):
            raise NotHermitian("effect is not Hermitian")
        eigenvalues = jacobi_eigenvalues(m)
        if eigenvalues[0] < -PSD_TOL or eigenvalues[-1] > 1 + PSD_TOL:
            raise InvalidOperator(
                f"effect spectrum [{eigenvalues[0]:.3g}, {eigenvalues[-1]:.3g}] "
                "is not inside [0, 1]"
            )
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def complement(self) -> "Effect":
        return Effect(identity(self.dim) - self.m)


@dataclass(frozen=True, eq=False)
class KrausMap:
    """
    Completely positive map on observables, ``a -> sum K^dagger a K``.
    """

    kraus: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus)
        if not ops:
            raise InvalidOperator("a Kraus map needs at least one operator")
        dims = {k.shape[0] for k in ops}
        if len(dims) != 1:
            raise DimMismatch(f"Kraus operators have mixed dims {sorted(dims)}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @classmethod
    def identity(cls, dim: int) -> "KrausMap":
        return cls((identity(dim),))

    @classmethod
    def conjugation(cls, u) -> "KrausMap":
        return cls((u,))

    @classmethod
    def zero(cls, dim: int) -> "KrausMap":
        return cls((np.zeros((dim, dim), dtype=np.complex128),))

    def __call__(self, a) -> np.ndarray:
        return apply_map(self, a)

    def is_unital(self, tol: float = UNITAL_TOL) -> bool:
        return bool(np.max(np.abs(self(identity(self.dim)) - identity(self.dim))) <= tol)

    def lift(self, dim_a: int, dim_b: int, side: str) -> "KrausMap":
        """Embed as ``K (x) 1`` (side "a") or ``1 (x) K`` (side "b")."""
        if side == "a":
            return KrausMap(tuple(np.kron(k, identity(dim_b)) for k in self.kraus))
        return KrausMap(tuple(np.kron(identity(dim_a), k) for k in self.kraus))


def apply_map(phi: KrausMap, a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (phi.dim, phi.dim):
        raise DimMismatch(f"map has dim {phi.dim}, observable {a.shape}")
    out = np.zeros_like(a)
    for k in phi.kraus:
        out += dagger(k) @ a @ k
    return out


@dataclass(frozen=True, eq=False)
class Instrument:
    """Two-outcome instrument; ``d0(1) + d1(1) == 1``."""

    d0: KrausMap
    d1: KrausMap

    def __post_init__(self):
        if self.d0.dim != self.d1.dim:
            raise DimMismatch("instrument branches differ in dimension")
        one = identity(self.dim)
        if np.max(np.abs(self.d0(one) + self.d1(one) - one)) > UNITAL_TOL:
            raise InvalidOperator("instrument branches do not sum to a unital map")

    @property
    def dim(self) -> int:
        return self.d0.dim

    def branch(self, k: int) -> KrausMap:
        return self.d1 if k else self.d0

    def total(self, a) -> np.ndarray:
        """D = D0 + D1."""
        return self.d0(a) + self.d1(a)

    def swapped(self) -> "Instrument":
        return Instrument(self.d1, self.d0)

    @classmethod
    def projective(cls, projector) -> "Instrument":
        """Branch 1 keeps ``projector``, branch 0 its complement."""
        p1 = as_matrix(projector)
        p0 = identity(p1.shape[0]) - p1
        return cls(KrausMap((p0,)), KrausMap((p1,)))


def matrix_to_dict(a) -> dict:
    a = as_matrix(a)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_dict(data: dict) -> np.ndarray:
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        dim = int(data.get("dim", re.shape[0]))
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidOperator(f"malformed matrix: {e}") from e
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimMismatch(f"matrix declared dim {dim}, got {re.shape}/{im.shape}")
    return re + 1j * im


def kraus_to_list(phi: KrausMap) -> list:
    return [matrix_to_dict(k) for k in phi.kraus]


def kraus_from_list(items: Iterable[dict]) -> KrausMap:
    return KrausMap(tuple(matrix_from_dict(item) for item in items))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + dagger(z))
