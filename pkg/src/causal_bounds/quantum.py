"""
Quantum latent-factor model of a noncompliance trial.

Advice ``z`` selects a channel ``G_z``, the decision is a two-outcome
instrument ``D = D0 + D1``, the drug status selects ``E_x`` and recovery is
the effect ``m``. Every observable probability is
``rho(G_z D_x E_x(m))`` or ``rho(G_z D_x E_x(1 - m))``.
"""
import json
import logging
from dataclasses import dataclass, replace
from typing import Dict, NamedTuple

import numpy as np

from .constants import DEFAULT_TOL, UNITAL_TOL
from .exceptions import DimMismatch, InadmissibleModel, InvalidModel, InvalidOperator
from .inequalities import (
    LOWER_FORMS,
    NATURAL_LOWER_FORM,
    NATURAL_UPPER_FORM,
    UPPER_FORMS,
    LinearForm,
)
from .operators import (
    DensityState,
    Effect,
    Instrument,
    KrausMap,
    identity,
    kraus_from_list,
    kraus_to_list,
    matrix_from_dict,
    matrix_to_dict,
    max_eigenvalue,
    min_eigenvalue,
    random_hermitian,
    random_unitary,
)
from .trial import ObservedDistribution

logger = logging.getLogger(__name__)


class Certificate(NamedTuple):
    """
    ``value`` is rho(C), the scalar the bound theorem is about;
    ``min_eigenvalue`` is the operator-level diagnostic.
    """

    min_eigenvalue: float
    value: float


@dataclass(frozen=True, eq=False)
class QuantumLatentModel:
    dim_a: int
    dim_b: int
    rho: DensityState
    g0: KrausMap
    g1: KrausMap
    d: Instrument
    e0: KrausMap
    e1: KrausMap
    m: Effect
    structured: bool = False

    def __post_init__(self):
        dim = self.dim_a * self.dim_b
        parts = {
            "rho": self.rho.dim,
            "G0": self.g0.dim,
            "G1": self.g1.dim,
            "D": self.d.dim,
            "E0": self.e0.dim,
            "E1": self.e1.dim,
            "m": self.m.dim,
        }
        wrong = {name: d for name, d in parts.items() if d != dim}
        if wrong:
            raise DimMismatch(f"expected dim {dim}, got {wrong}")
        for name, phi in (("G0", self.g0), ("G1", self.g1), ("E0", self.e0), ("E1", self.e1)):
            if not phi.is_unital(UNITAL_TOL):
                raise InvalidModel(f"{name} is not unital")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def g(self, z: int) -> KrausMap:
        return self.g1 if z else self.g0

    def e(self, x: int) -> KrausMap:
        return self.e1 if x else self.e0

    def m_l(self, x: int) -> np.ndarray:
        """m_x = E_x(m)."""
        return self.e(x)(self.m.m)

    def cell_operator(self, y: int, x: int, z: int) -> np.ndarray:
        """G_z D_x E_x(m) for y = 1, G_z D_x E_x(1 - m) for y = 0."""
        effect = self.m.m if y else identity(self.dim) - self.m.m
        return self.g(z)(self.d.branch(x)(self.e(x)(effect)))

    def counterfactual_operator(self, j: int, k: int, l: int) -> np.ndarray:
        return self.g(j)(self.d.branch(k)(self.m_l(l)))

    def ace_operator(self, z: int = 1) -> np.ndarray:
        """G_z D(m1) - G_z D(m0)."""
        g = self.g(z)
        return g(self.d.total(self.m_l(1))) - g(self.d.total(self.m_l(0)))

    def form_operator(self, form: LinearForm) -> np.ndarray:
        """Replace every cell of ``form`` by the operator that produces it."""
        op = form.constant * identity(self.dim)
        for (y, x, z), coeff in form.terms():
            op = op + coeff * self.cell_operator(y, x, z)
        return op

    def swap_advice(self) -> "QuantumLatentModel":
        """G1 <-> G0, the operator form of relabeling z."""
        return replace(self, g0=self.g1, g1=self.g0)

    def swap_decision_outcome(self) -> "QuantumLatentModel":
        """
        D1 <-> D0 with m1 <-> 1 - m0: the joint relabeling of x and y.
        """
        return replace(
            self, d=self.d.swapped(), e0=self.e1, e1=self.e0, m=self.m.complement()
        )

    def to_dict(self) -> dict:
        return {
            "dims": [self.dim_a, self.dim_b],
            "rho": matrix_to_dict(self.rho.rho),
            "G0": kraus_to_list(self.g0),
            "G1": kraus_to_list(self.g1),
            "D0": kraus_to_list(self.d.d0),
            "D1": kraus_to_list(self.d.d1),
            "E0": kraus_to_list(self.e0),
            "E1": kraus_to_list(self.e1),
            "m": matrix_to_dict(self.m.m),
            "structured": self.structured,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuantumLatentModel":
        try:
            dim_a, dim_b = (int(v) for v in data["dims"])
            return cls(
                dim_a=dim_a,
                dim_b=dim_b,
                rho=DensityState(matrix_from_dict(data["rho"])),
                g0=kraus_from_list(data["G0"]),
                g1=kraus_from_list(data["G1"]),
                d=Instrument(kraus_from_list(data["D0"]), kraus_from_list(data["D1"])),
                e0=kraus_from_list(data["E0"]),
                e1=kraus_from_list(data["E1"]),
                m=Effect(matrix_from_dict(data["m"])),
                structured=bool(data.get("structured", False)),
            )
        except (KeyError, TypeError) as e:
            raise InvalidModel(f"malformed quantum model: {e}") from e
        except (InvalidOperator, DimMismatch) as e:
            raise InvalidModel(str(e)) from e

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def structured_model(
    rho,
    g0_a: KrausMap,
    g1_a: KrausMap,
    d_a: Instrument,
    e0_b: KrausMap,
    e1_b: KrausMap,
    m_b,
) -> QuantumLatentModel:
    """
    Advice and decision act on subsystem A, drug and recovery on B, which
    makes the exclusion restriction hold by construction.
    """
    dim_a, dim_b = g0_a.dim, e0_b.dim
    state = rho if isinstance(rho, DensityState) else DensityState(rho)
    return QuantumLatentModel(
        dim_a=dim_a,
        dim_b=dim_b,
        rho=state,
        g0=g0_a.lift(dim_a, dim_b, "a"),
        g1=g1_a.lift(dim_a, dim_b, "a"),
        d=Instrument(d_a.d0.lift(dim_a, dim_b, "a"), d_a.d1.lift(dim_a, dim_b, "a")),
        e0=e0_b.lift(dim_a, dim_b, "b"),
        e1=e1_b.lift(dim_a, dim_b, "b"),
        m=Effect(np.kron(identity(dim_a), np.asarray(m_b))),
        structured=True,
    )


def check_exclusion(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> float:
    """
    max over l of |rho(G1 D(m_l)) - rho(G0 D(m_l))|. The model is admissible
    iff this is at most ``tol``; larger deviations are logged.
    """
    deviation = 0.0
    for l in (0, 1):
        d_ml = model.d.total(model.m_l(l))
        deviation = max(deviation, abs(model.rho(model.g1(d_ml)) - model.rho(model.g0(d_ml))))
    if deviation > tol:
        logger.debug("exclusion violated: deviation %.3g > tol %.3g", deviation, tol)
    return deviation


def is_admissible(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> bool:
    return check_exclusion(model, tol) <= tol


def ensure_admissible(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> None:
    deviation = check_exclusion(model, tol)
    if deviation > tol:
        raise InadmissibleModel(deviation, tol)


def observed_distribution(
    model: QuantumLatentModel, pz: float = 0.5, tol: float = DEFAULT_TOL
) -> ObservedDistribution:
    ensure_admissible(model, tol)
    p = np.empty((2, 2, 2))
    for y in (0, 1):
        for x in (0, 1):
            for z in (0, 1):
                p[y, x, z] = model.rho(model.cell_operator(y, x, z))
    return ObservedDistribution(p, pz)


def counterfactual(
    model: QuantumLatentModel, j: int, k: int, l: int, tol: float = DEFAULT_TOL
) -> float:
    """rho(G_j D_k E_l(m)): advice j, decision k, but drug status l."""
    ensure_admissible(model, tol)
    return model.rho(model.counterfactual_operator(j, k, l))


def quantum_ace(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> float:
    ensure_admissible(model, tol)
    return model.rho(model.ace_operator(1))


def _certify(model: QuantumLatentModel, c: np.ndarray) -> Certificate:
    return Certificate(min_eigenvalue(c), model.rho(c))


def certificate_group1(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> Certificate:
    """
    C = 1 + G1 D(m1) - G1 D(m0) - G1 D1(m1) - G0 D0(1 - m0), whose
    expectation is ACE minus the first lower bound.
    """
    ensure_admissible(model, tol)
    one = identity(model.dim)
    c = (
        one
        + model.ace_operator(1)
        - model.g1(model.d.d1(model.m_l(1)))
        - model.g0(model.d.d0(one - model.m_l(0)))
    )
    return _certify(model, c)


def certificate_natural(model: QuantumLatentModel, tol: float = DEFAULT_TOL) -> Certificate:
    """G1 D0(m1) + G0 D1(1 - m0), a sum of CP images of positive operators."""
    ensure_admissible(model, tol)
    one = identity(model.dim)
    c = model.g1(model.d.d0(model.m_l(1))) + model.g0(model.d.d1(one - model.m_l(0)))
    return _certify(model, c)


def bound_certificate(
    model: QuantumLatentModel, side: str, index: int, tol: float = DEFAULT_TOL
) -> Certificate:
    """
    Operator form of "ACE - lower_i" (side "lower") or "upper_i - ACE"
    (side "upper"); index 0 selects the natural bound of that side.
    """
    ensure_admissible(model, tol)
    if side == "lower":
        form = NATURAL_LOWER_FORM if index == 0 else LOWER_FORMS[index - 1]
        c = model.ace_operator(1) - model.form_operator(form)
    elif side == "upper":
        form = NATURAL_UPPER_FORM if index == 0 else UPPER_FORMS[index - 1]
        c = model.form_operator(form) - model.ace_operator(1)
    else:
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    return _certify(model, c)


def symmetric_certificates(
    model: QuantumLatentModel, tol: float = DEFAULT_TOL
) -> Dict[str, Certificate]:
    """
    certificate_group1 re-run on the symmetry images of ``model``. The advice
    swap and the decision/outcome swap each turn it into a certificate for
    the second lower bound; applying both returns to the first.
    """
    return {
        "identity": certificate_group1(model, tol),
        "advice_swap": certificate_group1(model.swap_advice(), tol),
        "decision_outcome_swap": certificate_group1(model.swap_decision_outcome(), tol),
        "both": certificate_group1(model.swap_advice().swap_decision_outcome(), tol),
    }


def _random_effect(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random Hermitian squashed affinely onto the spectrum [0, 1]."""
    h = random_hermitian(rng, dim)
    low, high = min_eigenvalue(h), max_eigenvalue(h)
    m = (h - low * identity(dim)) / (high - low)
    return 0.5 * (m + m.conj().T)


def random_model(
    seed: int, dim_a: int = 2, dim_b: int = 2, mixing: float = 0.0
) -> QuantumLatentModel:
    """
    Random structured model: entangled pure state (optionally mixed with
    weight ``mixing`` of white noise), Haar advice unitaries, a projective
    decision on A, Haar drug unitaries and a random effect on B.
    """
    if dim_a < 2 or dim_b < 2:
        raise ValueError("both subsystems need dimension at least 2")
    rng = np.random.default_rng(seed)
    dim = dim_a * dim_b

    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    psi /= np.linalg.norm(psi)
    rho = (1 - mixing) * np.outer(psi, psi.conj()) + mixing * identity(dim) / dim

    g0 = KrausMap.conjugation(random_unitary(rng, dim_a))
    g1 = KrausMap.conjugation(random_unitary(rng, dim_a))

    rank = int(rng.integers(1, dim_a))
    v = random_unitary(rng, dim_a)
    projector = v[:, :rank] @ v[:, :rank].conj().T
    decision = Instrument.projective(projector)

    e0 = KrausMap.conjugation(random_unitary(rng, dim_b))
    e1 = KrausMap.conjugation(random_unitary(rng, dim_b))
    m_b = _random_effect(rng, dim_b)

    logger.debug("random structured model seed=%d dims=%dx%d rank=%d", seed, dim_a, dim_b, rank)
    return structured_model(rho, g0, g1, decision, e0, e1, m_b)
