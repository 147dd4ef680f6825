import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_bounds.epr import projector, singlet_state
from causal_bounds.exceptions import DimMismatch, InvalidOperator, NotHermitian
from causal_bounds.operators import (
    DensityState,
    Effect,
    Instrument,
    KrausMap,
    apply_map,
    expectation,
    identity,
    jacobi_eigenvalues,
    kraus_from_list,
    kraus_to_list,
    matrix_from_dict,
    matrix_to_dict,
    min_eigenvalue,
    partial_trace_a,
    partial_trace_b,
    random_hermitian,
    random_unitary,
    tensor,
)
from tests.utils import angles, assert_close, seeds

dims = st.integers(min_value=1, max_value=6)


class TestJacobi:
    @given(seeds, dims)
    @settings(max_examples=100)
    def test_matches_eigvalsh(self, seed, dim):
        h = random_hermitian(np.random.default_rng(seed), dim)
        assert_close(jacobi_eigenvalues(h), np.linalg.eigvalsh(h), tol=1e-9)

    @given(seeds, st.integers(min_value=3, max_value=16))
    @settings(max_examples=200, deadline=None)
    def test_larger_matrices(self, seed, dim):
        h = random_hermitian(np.random.default_rng(seed), dim)
        eigenvalues = jacobi_eigenvalues(h)
        assert np.all(np.isfinite(eigenvalues))
        assert_close(eigenvalues, np.linalg.eigvalsh(h), tol=1e-9 * max(1.0, np.linalg.norm(h)))

    @given(seeds, st.integers(min_value=2, max_value=16))
    @settings(max_examples=200)
    def test_random_diagonal(self, seed, dim):
        d = np.random.default_rng(seed).uniform(-1, 1, dim)
        assert_close(jacobi_eigenvalues(np.diag(d)), np.sort(d))

    def test_nearly_diagonal(self):
        h = np.diag([0.1505, 0.3745, 0.3646, 0.1104]).astype(complex)
        h[0, 1], h[1, 0] = 1e-300j, -1e-300j
        assert_close(jacobi_eigenvalues(h), [0.1104, 0.1505, 0.3646, 0.3745])

    def test_density_state_on_valid_diagonal(self):
        state = DensityState(np.diag([0.1505, 0.3745, 0.3646, 0.1104]))
        assert state(identity(4)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert_close(jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0])), [-1.0, 2.0, 3.0])

    def test_complex_off_diagonal(self):
        h = np.array([[0, 1j], [-1j, 0]])
        assert_close(jacobi_eigenvalues(h), [-1.0, 1.0], tol=1e-12)

    def test_degenerate(self):
        assert_close(jacobi_eigenvalues(identity(4)), np.ones(4))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            jacobi_eigenvalues(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimMismatch):
            jacobi_eigenvalues(np.zeros((2, 3)))


class TestTensor:
    def test_kron(self):
        a = np.diag([1.0, 2.0])
        b = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert_close(tensor(a, b), np.kron(a, b))

    def test_partial_traces(self):
        rng = np.random.default_rng(0)
        a = random_hermitian(rng, 2)
        b = random_hermitian(rng, 3)
        ab = tensor(a, b)
        assert_close(partial_trace_a(ab, 2, 3), np.trace(a) * b, tol=1e-12)
        assert_close(partial_trace_b(ab, 2, 3), np.trace(b) * a, tol=1e-12)


class TestDensityState:
    def test_pure(self):
        state = DensityState.pure([1.0, 1.0])
        assert state(np.diag([1.0, 0.0])) == pytest.approx(0.5)
        assert np.trace(state.rho @ state.rho).real == pytest.approx(1.0)

    def test_rejects_bad_trace(self):
        with pytest.raises(InvalidOperator):
            DensityState(np.diag([0.5, 0.2]))

    def test_rejects_negative(self):
        with pytest.raises(InvalidOperator):
            DensityState(np.diag([1.5, -0.5]))

    def test_expectation_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            expectation(DensityState.maximally_mixed(2), identity(3))


class TestEffect:
    def test_projector(self):
        effect = Effect(np.diag([1.0, 0.0]))
        assert_close(effect.complement().m, np.diag([0.0, 1.0]))

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidOperator):
            Effect(np.diag([1.2, 0.0]))


class TestKrausMap:
    @given(seeds)
    @settings(max_examples=30)
    def test_conjugation_is_unital(self, seed):
        u = random_unitary(np.random.default_rng(seed), 3)
        assert KrausMap.conjugation(u).is_unital()

    def test_apply_map_is_heisenberg_picture(self):
        u = random_unitary(np.random.default_rng(6), 2)
        a = np.diag([1.0, 0.0])
        assert_close(apply_map(KrausMap.conjugation(u), a), u.conj().T @ a @ u, tol=1e-12)

    def test_zero_is_not_unital(self):
        assert not KrausMap.zero(2).is_unital()

    def test_lift(self):
        u = random_unitary(np.random.default_rng(4), 2)
        a, b = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        lifted = KrausMap.conjugation(u).lift(2, 2, "a")
        assert_close(lifted(tensor(a, b)), tensor(KrausMap.conjugation(u)(a), b), tol=1e-12)

    def test_mixed_dims(self):
        with pytest.raises(DimMismatch):
            KrausMap((identity(2), identity(3)))

    def test_apply_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            KrausMap.identity(2)(identity(4))


class TestInstrument:
    def test_projective_branches(self):
        instrument = Instrument.projective(np.diag([1.0, 0.0]))
        a = np.array([[1.0, 2.0], [2.0, 3.0]])
        assert_close(instrument.branch(1)(a), np.diag([1.0, 0.0]))
        assert_close(instrument.total(a), np.diag([1.0, 3.0]))
        assert_close(instrument.swapped().branch(0)(a), np.diag([1.0, 0.0]))

    def test_rejects_non_unital_total(self):
        with pytest.raises(InvalidOperator):
            Instrument(KrausMap.identity(2), KrausMap.identity(2))


class TestSerialization:
    def test_matrix(self):
        m = np.array([[1.0, 2j], [-2j, 0.5]])
        assert np.array_equal(matrix_from_dict(matrix_to_dict(m)), m)

    def test_kraus(self):
        u = random_unitary(np.random.default_rng(1), 2)
        again = kraus_from_list(kraus_to_list(KrausMap.conjugation(u)))
        assert np.array_equal(again.kraus[0], u)

    def test_malformed(self):
        with pytest.raises(InvalidOperator):
            matrix_from_dict({"im": [[0]]})
        with pytest.raises(DimMismatch):
            matrix_from_dict({"dim": 3, "re": [[1, 0], [0, 1]]})


class TestRandom:
    @given(seeds, st.integers(min_value=1, max_value=5))
    @settings(max_examples=30)
    def test_unitary(self, seed, dim):
        u = random_unitary(np.random.default_rng(seed), dim)
        assert_close(u.conj().T @ u, identity(dim), tol=1e-10)

    def test_min_eigenvalue_of_projector(self):
        assert min_eigenvalue(np.diag([1.0, 0.0])) == pytest.approx(0.0)


def _random_state(rng, dim):
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = b @ b.conj().T
    return DensityState(rho / np.trace(rho).real)


def _random_unital_map(rng, dim, terms=3):
    weights = rng.dirichlet(np.ones(terms))
    return KrausMap(tuple(math.sqrt(w) * random_unitary(rng, dim) for w in weights))


class TestPositivity:
    @given(seeds)
    @settings(max_examples=100, deadline=None)
    def test_unital_maps_preserve_psd(self, seed):
        rng = np.random.default_rng(seed)
        phi = _random_unital_map(rng, 3)
        assert phi.is_unital()
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        image = apply_map(phi, b @ b.conj().T)
        assert np.linalg.eigvalsh(image).min() >= -1e-9

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_expectation_is_linear_and_positive(self, seed):
        rng = np.random.default_rng(seed)
        state = _random_state(rng, 3)
        x, y = random_hermitian(rng, 3), random_hermitian(rng, 3)
        a, b = rng.uniform(-2, 2, size=2)
        assert expectation(state, a * x + b * y) == pytest.approx(
            a * expectation(state, x) + b * expectation(state, y), abs=1e-12
        )
        assert state(x @ x) >= -1e-12


class TestMixedProduct:
    @given(seeds)
    @settings(max_examples=30)
    def test_kron_mixed_product(self, seed):
        rng = np.random.default_rng(seed)
        a, c = random_hermitian(rng, 2), random_hermitian(rng, 2)
        b, d = random_hermitian(rng, 3), random_hermitian(rng, 3)
        assert_close(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d), tol=1e-12)

    @given(angles, angles)
    def test_singlet_coincidence(self, alpha, beta):
        value = singlet_state()(tensor(projector(alpha, 1), projector(beta, 1)))
        expected = (1 - math.cos(math.radians(2 * alpha - 2 * beta))) / 4
        assert value == pytest.approx(expected, abs=1e-12)
