import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kirkwood.errors import DimMismatch, InvalidDimension, NotComplementary, NotPhysical
from kirkwood.generate import (
    make_rng,
    random_basis,
    random_complementary_pair,
    random_density,
    random_unitary,
    shared_vector_pair,
)
from kirkwood.linalg import DensityMatrix, OrthonormalBasis
from kirkwood.quasiprob import KirkwoodTable, kirkwood, kirkwood_entries
from kirkwood.reconstruct import (
    BasisPair,
    check_complementary,
    check_mub,
    kirkwood_rebase,
    min_overlap,
    reassemble,
    reconstruct_density,
    reconstruct_fourier,
    schwinger_pair,
)

from conftest import MINUS, PLUS, dm

seeds = st.integers(0, 2**32)


def table_of(rho, pair):
    return kirkwood(rho, pair.a_pvm, pair.b_pvm)


class TestComplementarity:
    @pytest.mark.parametrize("n", [2, 3, 7, 16])
    def test_schwinger_is_mub(self, n):
        pair = schwinger_pair(n)
        assert check_complementary(pair)
        assert check_mub(pair)
        assert min_overlap(pair) == pytest.approx(1 / np.sqrt(n))

    @pytest.mark.parametrize("n", [2, 4])
    def test_basis_with_itself(self, n, rng):
        b = random_basis(n, rng)
        comp = check_complementary(BasisPair(b, b))
        assert not comp
        assert len(comp.offending) == n * (n - 1)
        assert all(k != m for k, m in comp.offending)

    def test_shared_vector_rejected(self, rng):
        pair = shared_vector_pair(3, rng, shared=1)
        comp = check_complementary(pair)
        assert not comp
        # the shared vector is orthogonal to the two other vectors of each basis
        assert (1, 0) in comp.offending and (0, 1) in comp.offending

    def test_rotation_is_complementary_but_not_mub(self):
        c, s = np.cos(0.3), np.sin(0.3)
        pair = BasisPair(OrthonormalBasis.standard(2), OrthonormalBasis([[c, s], [-s, c]]))
        assert check_complementary(pair)
        assert not check_mub(pair)
        assert min_overlap(pair) == pytest.approx(s)

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(2, 8), seed=seeds)
    def test_mub_implies_complementary(self, n, seed):
        # a common unitary applied to both Schwinger bases keeps them unbiased
        u = random_unitary(n, make_rng(seed))
        s = schwinger_pair(n)
        pair = BasisPair(OrthonormalBasis.from_columns(u @ s.a.vectors.T),
                         OrthonormalBasis.from_columns(u @ s.b.vectors.T))
        assert check_mub(pair)
        assert check_complementary(pair)


class TestSchwinger:
    def test_qubit_is_hadamard(self):
        pair = schwinger_pair(2)
        np.testing.assert_allclose(pair.overlaps, np.array([[1, 1], [1, -1]]) / np.sqrt(2),
                                   atol=1e-15)
        np.testing.assert_allclose(pair.b.vectors, [PLUS, MINUS], atol=1e-15)

    def test_four_entry(self):
        # exp(2 pi i / 4) / 2
        assert schwinger_pair(4).overlaps[1, 1] == pytest.approx(0.5j)

    def test_invalid_dimension(self):
        with pytest.raises(InvalidDimension):
            schwinger_pair(1)


class TestReconstruction:
    @pytest.mark.parametrize("n", [2, 3, 5, 16])
    def test_round_trip_schwinger(self, n, rng):
        pair = schwinger_pair(n)
        for kind in ("pure", "mixed"):
            rho = random_density(n, rng, kind)
            out = reconstruct_density(table_of(rho, pair), pair)
            assert np.abs(out.matrix - rho.matrix).max() <= 1e-8

    def test_maximally_mixed(self):
        pair = schwinger_pair(4)
        table = KirkwoodTable(np.full((4, 4), 1 / 16), pair.a_pvm, pair.b_pvm)
        np.testing.assert_allclose(reconstruct_density(table, pair).matrix, np.eye(4) / 4,
                                   atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(2, 8), seed=seeds)
    def test_round_trip_random_pair(self, n, seed):
        rng = make_rng(seed)
        pair = random_complementary_pair(n, rng)
        rho = random_density(n, rng, "pure" if seed % 2 else "mixed")
        raw = reassemble(table_of(rho, pair), pair)
        assert np.abs(raw - raw.conj().T).max() <= 1e-10
        out = reconstruct_density(table_of(rho, pair), pair)
        assert np.abs(out.matrix - rho.matrix).max() <= 1e-8

    def test_shared_vector_raises(self, rng):
        pair = shared_vector_pair(3, rng)
        rho = random_density(3, rng)
        with pytest.raises(NotComplementary) as exc:
            reconstruct_density(table_of(rho, pair), pair)
        assert exc.value.offending

    def test_not_physical(self):
        pair = schwinger_pair(2)
        # table of the unit-trace hermitian matrix diag(1.2, -0.2)
        k = kirkwood_entries(np.diag([1.2, -0.2]).astype(complex), pair.a_pvm.stack,
                             pair.b_pvm.stack)
        table = KirkwoodTable(k, pair.a_pvm, pair.b_pvm)
        np.testing.assert_allclose(reassemble(table, pair), np.diag([1.2, -0.2]), atol=1e-14)
        with pytest.raises(NotPhysical):
            reconstruct_density(table, pair)

    def test_wrong_pair(self, rng):
        rho = random_density(3, rng)
        table = table_of(rho, schwinger_pair(3))
        with pytest.raises(DimMismatch):
            reconstruct_density(table, random_complementary_pair(3, rng))
        with pytest.raises(DimMismatch):
            reconstruct_density(table, schwinger_pair(4))


class TestFourier:
    def test_fourier_state_is_delta(self):
        pair = schwinger_pair(5)
        rho = dm(pair.b.vectors[2])
        out = reconstruct_fourier(table_of(rho, pair), 5)
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 6, 11])
    def test_agrees_with_inversion(self, n, rng):
        pair = schwinger_pair(n)
        for _ in range(5):
            table = table_of(random_density(n, rng), pair)
            diff = reconstruct_fourier(table, n).matrix - reconstruct_density(table, pair).matrix
            assert np.abs(diff).max() <= 1e-10

    def test_requires_schwinger_table(self, rng):
        pair = random_complementary_pair(3, rng)
        with pytest.raises(DimMismatch):
            reconstruct_fourier(table_of(random_density(3, rng), pair), 3)


class TestRebase:
    def test_identity(self, rng):
        pair = schwinger_pair(3)
        table = table_of(random_density(3, rng), pair)
        np.testing.assert_allclose(kirkwood_rebase(table, pair, pair).entries, table.entries,
                                   atol=1e-12)

    def test_there_and_back(self, rng):
        p, q = schwinger_pair(4), random_complementary_pair(4, rng)
        rho = random_density(4, rng)
        moved = kirkwood_rebase(table_of(rho, p), p, q)
        np.testing.assert_allclose(moved.entries, table_of(rho, q).entries, atol=1e-10)
        np.testing.assert_allclose(kirkwood_rebase(moved, q, p).entries, table_of(rho, p).entries,
                                   atol=1e-10)

    def test_maximally_mixed_over_mub(self, rng):
        p, q = random_complementary_pair(3, rng), schwinger_pair(3)
        moved = kirkwood_rebase(table_of(DensityMatrix.maximally_mixed(3), p), p, q)
        np.testing.assert_allclose(moved.entries, 1 / 9, atol=1e-12)
