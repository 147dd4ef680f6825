import numpy as np
import pytest

from causal_bounds.epr import PUBLISHED_ANGLES, toy_distribution, toy_embedding
from causal_bounds.operators import DensityState, Effect, Instrument, KrausMap, identity
from causal_bounds.quantum import QuantumLatentModel
from causal_bounds.trial import ObservedDistribution, uniform_distribution


def pytest_configure(config):
    from django.conf import settings

    if not settings.configured:
        settings.configure()
    config.addinivalue_line("markers", "slow: randomized acceptance suites")


@pytest.fixture
def toy_dist():
    return toy_distribution(PUBLISHED_ANGLES)


@pytest.fixture
def toy_model():
    return toy_embedding(PUBLISHED_ANGLES)


@pytest.fixture
def uniform_dist():
    return uniform_distribution()


@pytest.fixture
def compliance_dist():
    """Every patient follows the advice; ACE is identified as 0.3."""
    p = np.zeros((2, 2, 2))
    p[1, 1, 1] = 0.7
    p[0, 1, 1] = 0.3
    p[1, 0, 0] = 0.4
    p[0, 0, 0] = 0.6
    return ObservedDistribution(p)


@pytest.fixture
def infeasible_dist():
    """Advice flips the recovery of drug takers, which no classical model allows."""
    p = np.zeros((2, 2, 2))
    p[1, 1, 0] = 1.0
    p[0, 1, 1] = 1.0
    return ObservedDistribution(p)


@pytest.fixture
def broken_model():
    """Advice rotates the outcome system directly, so z reaches y without x."""
    h = np.array([1.0, 0.0])
    rho = np.outer(np.kron(h, h), np.kron(h, h))
    quarter_turn = np.kron(identity(2), np.array([[0.0, -1.0], [1.0, 0.0]]))
    return QuantumLatentModel(
        dim_a=2,
        dim_b=2,
        rho=DensityState(rho),
        g0=KrausMap.identity(4),
        g1=KrausMap.conjugation(quarter_turn),
        d=Instrument.projective(np.kron(np.diag([1.0, 0.0]), identity(2))),
        e0=KrausMap.identity(4),
        e1=KrausMap.identity(4),
        m=Effect(np.kron(identity(2), np.diag([1.0, 0.0]))),
    )
