import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kirkwood.errors import (
    DimMismatch,
    NotComplete,
    NotHermitian,
    NotIdempotent,
    NotOrthogonal,
    NotPositive,
    NotUnitTrace,
)
from kirkwood.generate import make_rng, random_basis, random_pvm
from kirkwood.linalg import (
    PVM,
    DensityMatrix,
    OrthonormalBasis,
    Projector,
    StateVector,
    Tolerances,
    overlap_matrix,
    pvm_from_basis,
    pvm_from_observable,
    validate_density,
)

from conftest import MINUS, PLUS

seeds = st.integers(0, 2**32)
dims = st.integers(2, 8)


class TestValidateDensity:
    def test_maximally_mixed_qubit(self):
        rho = validate_density(np.eye(2) / 2)
        np.testing.assert_array_equal(rho.matrix, np.eye(2) / 2)

    def test_diagonal_probabilities(self):
        rho = validate_density(np.diag([0.7, 0.3]))
        assert rho.dim == 2

    def test_trace_too_large(self):
        with pytest.raises(NotUnitTrace) as exc:
            validate_density(np.diag([0.7, 0.4]))
        assert exc.value.magnitude == pytest.approx(0.1)

    def test_not_hermitian_reports_magnitude(self):
        with pytest.raises(NotHermitian) as exc:
            validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
        assert exc.value.magnitude == pytest.approx(0.1)

    def test_negative_eigenvalue(self):
        with pytest.raises(NotPositive) as exc:
            validate_density(np.diag([1.2, -0.2]))
        assert exc.value.magnitude == pytest.approx(0.2)

    def test_not_square(self):
        with pytest.raises(DimMismatch):
            validate_density(np.ones((2, 3)) / 6)

    def test_returns_hermitized_input(self):
        m = np.array([[0.5, 0.2 + 1e-12j], [0.2, 0.5]])
        rho = validate_density(m)
        np.testing.assert_array_equal(rho.matrix, 0.5 * (m + m.conj().T))

    def test_hermitization_idempotent(self):
        m = np.array([[0.5, 0.2 + 1e-12j], [0.2, 0.5]])
        once = validate_density(m).matrix
        np.testing.assert_array_equal(validate_density(once).matrix, once)

    def test_override_tolerance(self):
        m = np.array([[0.5, 0.2 + 1e-6j], [0.2, 0.5]])
        with pytest.raises(NotHermitian):
            validate_density(m)
        validate_density(m, Tolerances(herm=1e-5))

    def test_immutable(self):
        rho = validate_density(np.eye(2) / 2)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1
        with pytest.raises(AttributeError):
            rho.matrix = np.eye(2)


def test_direct_construction_validates():
    with pytest.raises(NotUnitTrace):
        DensityMatrix(np.eye(2))


def test_state_vector_normalization():
    StateVector(PLUS)
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))


def test_projector_invariants():
    assert Projector(np.diag([1, 1, 0])).rank == 2
    with pytest.raises(NotIdempotent):
        Projector(np.diag([0.5, 1]))
    with pytest.raises(NotHermitian):
        Projector(np.array([[1, 1], [0, 0]]))
    with pytest.raises(ValueError):
        Projector(np.zeros((2, 2)))


def test_pvm_invariants():
    with pytest.raises(NotComplete):
        PVM((Projector(np.diag([1, 0, 0])), Projector(np.diag([0, 1, 0]))))
    p = Projector(np.outer(PLUS, PLUS))
    with pytest.raises(NotOrthogonal):
        PVM((Projector(np.diag([1, 0])), p))


class TestPvmFromBasis:
    def test_standard(self):
        pvm = pvm_from_basis(OrthonormalBasis.standard(2))
        np.testing.assert_array_equal(pvm[0].matrix, np.diag([1, 0]))
        np.testing.assert_array_equal(pvm[1].matrix, np.diag([0, 1]))

    def test_hadamard(self):
        # outer products worked out by hand
        pvm = pvm_from_basis(OrthonormalBasis([PLUS, MINUS]))
        np.testing.assert_allclose(pvm[0].matrix, 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-15)
        np.testing.assert_allclose(pvm[1].matrix, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(dim=dims, seed=seeds)
    def test_rank_one_and_complete(self, dim, seed):
        pvm = pvm_from_basis(random_basis(dim, make_rng(seed)))
        assert pvm.ranks == (1,) * dim
        np.testing.assert_allclose(pvm.stack.sum(axis=0), np.eye(dim), atol=1e-10)


class TestPvmFromObservable:
    def test_exact_degeneracy(self):
        pvm = pvm_from_observable(np.diag([1.0, 1.0, 2.0]), 1e-8)
        assert pvm.ranks == (2, 1)
        assert pvm.labels == (1.0, 2.0)

    def test_pauli_z(self):
        pvm = pvm_from_observable(np.diag([1.0, -1.0]))
        assert pvm.ranks == (1, 1)
        assert pvm.labels == (-1.0, 1.0)
        np.testing.assert_allclose(pvm[0].matrix, np.diag([0, 1]))

    def test_near_degenerate_cluster(self):
        # gaps 1e-12 (< tol) and ~4 (> tol): clusters {1, 1+1e-12} and {5}
        pvm = pvm_from_observable(np.diag([1.0, 1.0 + 1e-12, 5.0]), 1e-8)
        assert pvm.ranks == (2, 1)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            pvm_from_observable(np.array([[0, 1], [0, 0]]))

    @settings(max_examples=30, deadline=None)
    @given(dim=dims, seed=seeds)
    def test_recovers_random_degenerate_observable(self, dim, seed):
        rng = make_rng(seed)
        source = random_pvm(dim, rng)
        eigenvalues = np.sort(rng.choice(np.arange(-10, 10), len(source), replace=False))
        obs = sum(float(e) * p for e, p in zip(eigenvalues, source.stack))
        pvm = pvm_from_observable(obs)
        assert sum(pvm.ranks) == dim
        assert pvm.labels == pytest.approx(tuple(eigenvalues))
        assert all(np.diff(pvm.labels) > 0)
        for p in pvm.stack:
            matches = [np.abs(p - q).max() < 1e-9 for q in source.stack]
            assert sum(matches) == 1
        np.testing.assert_allclose(sum(e * p for e, p in zip(pvm.labels, pvm.stack)), obs,
                                   atol=1e-9)


class TestOverlap:
    def test_with_itself(self, rng):
        b = random_basis(4, rng)
        np.testing.assert_allclose(overlap_matrix(b, b), np.eye(4), atol=1e-12)

    def test_standard_vs_hadamard(self):
        o = overlap_matrix(OrthonormalBasis.standard(2), OrthonormalBasis([PLUS, MINUS]))
        np.testing.assert_allclose(o, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            overlap_matrix(OrthonormalBasis.standard(2), OrthonormalBasis.standard(3))

    @settings(max_examples=30, deadline=None)
    @given(dim=dims, seed=seeds)
    def test_unitary_and_inverse(self, dim, seed):
        rng = make_rng(seed)
        a, b = random_basis(dim, rng), random_basis(dim, rng)
        o = overlap_matrix(a, b)
        np.testing.assert_allclose(o @ o.conj().T, np.eye(dim), atol=1e-10)
        np.testing.assert_allclose(o @ overlap_matrix(b, a), np.eye(dim), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(dim=dims, seed=seeds)
def test_random_pvm_invariants(dim, seed):
    pvm = random_pvm(dim, make_rng(seed))
    assert sum(pvm.ranks) == dim
    for i in range(len(pvm)):
        for j in range(len(pvm)):
            expected = pvm.stack[i] if i == j else 0
            np.testing.assert_allclose(pvm.stack[i] @ pvm.stack[j], expected, atol=1e-10)
