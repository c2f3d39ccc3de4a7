import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocluster import (
    CoClustering,
    aggregate,
    connected_components,
    entropy,
    mutual_information,
    normalize,
    relevant_information_loss,
)
from cocluster.errors import (
    DimensionMismatch,
    EmptyRowOrCol,
    NegativeEntry,
    NonFinite,
    NotADistribution,
    ZeroMatrix,
)

from oracles import mi_bits, random_distribution

FIG_A = np.array([[0.12, 0.0, 0.0], [0.0, 0.39, 0.05], [0.0, 0.05, 0.39]])


class TestNormalize:
    def test_uniform_scaling(self):
        dist = normalize([[2, 0], [0, 2]])
        assert dist.prob(0, 0) == 0.5
        assert dist.prob(1, 1) == 0.5
        assert dist.prob(0, 1) == 0.0
        assert dist.nnz == 2

    def test_symmetric(self):
        dist = normalize([[1, 1], [1, 1]])
        assert np.allclose(dist.dense(), 0.25)
        assert np.allclose(dist.row_marginal, [0.5, 0.5])
        assert np.allclose(dist.col_marginal, [0.5, 0.5])

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry) as err:
            normalize([[-1, 0], [0, 1]])
        assert err.value.position == (0, 0)

    def test_zero_matrix(self):
        with pytest.raises(ZeroMatrix):
            normalize([[0.0, 0.0], [0.0, 0.0]])

    def test_non_finite(self):
        with pytest.raises(NonFinite) as err:
            normalize([[1.0, np.nan], [0.0, 1.0]])
        assert err.value.position == (0, 1)

    def test_empty_row_rejected(self):
        with pytest.raises(EmptyRowOrCol):
            normalize([[1, 1], [0, 0]])
        with pytest.raises(EmptyRowOrCol):
            normalize([[1, 0], [1, 0]])

    def test_marginals_match_recomputation(self, rng):
        mat = random_distribution(rng, 7, 5)
        dist = normalize(mat)
        dense = dist.dense()
        assert np.abs(dist.row_marginal - dense.sum(axis=1)).max() <= 1e-12
        assert np.abs(dist.col_marginal - dense.sum(axis=0)).max() <= 1e-12
        assert abs(dense.sum() - 1.0) <= 1e-9

    @given(scale=st.floats(min_value=1e-6, max_value=1e6))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, scale):
        base = np.array([[1.0, 2.0, 0.5], [0.25, 3.0, 1.5]])
        a = normalize(base).dense()
        b = normalize(scale * base).dense()
        assert np.abs(a - b).max() <= 1e-12

    def test_immutability(self):
        dist = normalize([[1, 1], [1, 1]])
        with pytest.raises(ValueError):
            dist.row_marginal[0] = 0.9


class TestEntropy:
    def test_fair_coin(self):
        assert entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate(self):
        assert entropy([1.0, 0.0]) == 0.0

    def test_binary_skewed(self):
        # Oracle: direct evaluation of the two-term sum.
        expected = -(0.12 * np.log2(0.12) + 0.88 * np.log2(0.88))
        assert expected == pytest.approx(0.529361, abs=1e-5)
        assert entropy([0.12, 0.88]) == pytest.approx(expected, abs=1e-12)

    def test_rejects_non_distribution(self):
        with pytest.raises(NotADistribution):
            entropy([0.5, 0.4])
        with pytest.raises(NotADistribution):
            entropy([1.5, -0.5])


class TestMutualInformation:
    def test_perfect_correspondence(self):
        assert mutual_information(np.diag([0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)

    def test_independence(self):
        assert mutual_information(np.full((2, 2), 0.25)) == 0.0

    def test_block_matrix(self):
        # Oracle: direct sum over the 5 nonzero cells.
        marg = FIG_A.sum(axis=1)
        expected = sum(
            FIG_A[i, j] * np.log2(FIG_A[i, j] / (marg[i] * FIG_A.sum(axis=0)[j]))
            for i in range(3)
            for j in range(3)
            if FIG_A[i, j] > 0
        )
        assert expected == pytest.approx(0.95988, abs=1e-4)
        assert mutual_information(FIG_A) == pytest.approx(expected, abs=1e-12)

    def test_three_entropy_identity(self, rng):
        for _ in range(25):
            table = random_distribution(rng, int(rng.integers(2, 9)), int(rng.integers(2, 9)))
            h_form = (
                entropy(table.sum(axis=1))
                + entropy(table.sum(axis=0))
                - entropy(table.ravel())
            )
            assert mutual_information(table) == pytest.approx(h_form, abs=1e-10)

    def test_sparse_path_matches_dense(self, rng):
        table = random_distribution(rng, 8, 6, density=0.4)
        dist = normalize(table)
        assert dist.mutual_information() == pytest.approx(
            mutual_information(dist.dense()), abs=1e-12
        )


class TestAggregate:
    def test_identity_is_noop(self):
        dist = normalize(FIG_A)
        stats = aggregate(dist, CoClustering.identity(3, 3))
        assert np.abs(stats.p_rcluster_ccluster - dist.dense()).max() <= 1e-15

    def test_total_aggregation(self):
        dist = normalize(FIG_A)
        stats = aggregate(dist, CoClustering.constant(3, 3))
        assert stats.p_rcluster_ccluster.shape == (1, 1)
        assert stats.p_rcluster_ccluster[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_block_clustering(self):
        dist = normalize(FIG_A)
        stats = aggregate(dist, CoClustering([0, 1, 1], [0, 1, 1]))
        assert np.allclose(stats.p_rcluster_ccluster, [[0.12, 0.0], [0.0, 0.88]], atol=1e-12)

    def test_mixed_tables_consistent(self, rng):
        # The cluster x cluster table must be reachable by aggregating
        # either half-aggregated table the rest of the way.
        for _ in range(20):
            n, m = int(rng.integers(2, 9)), int(rng.integers(2, 9))
            table = random_distribution(rng, n, m)
            kr, kc = int(rng.integers(1, n + 1)), int(rng.integers(1, m + 1))
            phi = rng.integers(0, kr, n)
            psi = rng.integers(0, kc, m)
            stats = aggregate(normalize(table), CoClustering(phi, psi, kr, kc))
            from_rows = np.zeros((kr, kc))
            np.add.at(from_rows, phi, stats.p_row_ccluster)
            from_cols = np.zeros((kr, kc))
            np.add.at(from_cols.T, psi, stats.p_rcluster_col.T)
            assert np.abs(stats.p_rcluster_ccluster - from_rows).max() <= 1e-12
            assert np.abs(stats.p_rcluster_ccluster - from_cols).max() <= 1e-12
            assert stats.p_rcluster_ccluster.sum() == pytest.approx(1.0, abs=1e-9)

    def test_aggregated_mi_matches_bruteforce(self, rng):
        for _ in range(30):
            n, m = int(rng.integers(2, 9)), int(rng.integers(2, 9))
            table = random_distribution(rng, n, m, density=float(rng.uniform(0.3, 1.0)))
            kr, kc = int(rng.integers(1, n + 1)), int(rng.integers(1, m + 1))
            phi = rng.integers(0, kr, n)
            psi = rng.integers(0, kc, m)
            stats = aggregate(normalize(table), CoClustering(phi, psi, kr, kc))
            brute = np.zeros((kr, kc))
            for i in range(n):
                for j in range(m):
                    brute[phi[i], psi[j]] += table[i, j] / table.sum()
            assert mutual_information(stats.p_rcluster_ccluster) == pytest.approx(
                mi_bits(brute), abs=1e-12
            )

    def test_dimension_mismatch(self):
        dist = normalize(FIG_A)
        with pytest.raises(DimensionMismatch):
            aggregate(dist, CoClustering([0, 1], [0, 1, 1]))


class TestRelevantInformationLoss:
    def test_identity_map_loses_nothing(self):
        assert relevant_information_loss(FIG_A, [0, 1, 2]) == 0.0

    def test_constant_map_loses_everything(self):
        loss = relevant_information_loss(FIG_A, [0, 0, 0])
        assert loss == pytest.approx(mutual_information(FIG_A), abs=1e-12)

    def test_block_merge(self):
        # Oracle: difference of the two mutual informations involved.
        loss = relevant_information_loss(FIG_A, [0, 1, 1])
        expected = mutual_information(FIG_A) - mutual_information(
            np.column_stack([FIG_A[:, 0], FIG_A[:, 1] + FIG_A[:, 2]])
        )
        assert loss == pytest.approx(expected, abs=1e-12)
        assert loss == pytest.approx(0.430519, abs=1e-4)

    def test_data_processing_bounds(self, rng):
        for _ in range(40):
            n, m = int(rng.integers(2, 8)), int(rng.integers(2, 8))
            table = random_distribution(rng, n, m)
            k = int(rng.integers(1, m + 1))
            zeta = rng.integers(0, k, m)
            loss = relevant_information_loss(table, zeta)
            assert 0.0 <= loss <= mutual_information(table) + 1e-12

    def test_zeta_length_checked(self):
        with pytest.raises(DimensionMismatch):
            relevant_information_loss(FIG_A, [0, 1])


class TestConnectedComponents:
    def test_full_support_is_connected(self):
        n_comp, labels = connected_components([[1, 1], [1, 1]])
        assert n_comp == 1
        assert len(set(labels)) == 1

    def test_block_diagonal_splits(self):
        n_comp, labels = connected_components([[1, 0], [0, 1]])
        assert n_comp == 2
        # Row 0 shares a component with col 0, row 1 with col 1.
        assert labels[0] == labels[2]
        assert labels[1] == labels[3]

    def test_circulant_copies(self):
        from cocluster import CirculantSpec, gen_circulant

        dist, _, _ = gen_circulant(CirculantSpec(k=3))
        n_comp, _ = connected_components(dist.dense())
        assert n_comp == 3
