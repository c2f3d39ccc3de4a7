import numpy as np
import pytest

from cocluster import (
    CirculantSpec,
    CoClustering,
    PlantedSpec,
    connected_components,
    cost_beta,
    fixture,
    fixtures,
    gen_circulant,
    gen_planted,
    smooth,
)
from cocluster.errors import InvalidBoundaries, KOutOfRange


class TestPlanted:
    def test_noise_free_is_block_constant(self):
        spec = PlantedSpec(n_rows=12, n_cols=9, row_clusters=3, col_clusters=3, seed=5)
        dist, phi, psi = gen_planted(spec)
        dense = dist.dense()
        for r in range(3):
            for c in range(3):
                block = dense[np.ix_(phi == r, psi == c)]
                assert np.ptp(block) <= 1e-15

    def test_pure_noise_loses_block_structure(self):
        clean = PlantedSpec(n_rows=10, n_cols=8, row_clusters=2, col_clusters=2, seed=3)
        noisy = PlantedSpec(
            n_rows=10, n_cols=8, row_clusters=2, col_clusters=2, seed=3, noise_eps=1.0
        )
        dist_clean, phi, psi = gen_planted(clean)
        dist_noisy, _, _ = gen_planted(noisy)
        # Within-block spread is zero for the clean table, positive under
        # full noise.
        block_clean = dist_clean.dense()[np.ix_(phi == 0, psi == 0)]
        block_noisy = dist_noisy.dense()[np.ix_(phi == 0, psi == 0)]
        assert np.ptp(block_clean) <= 1e-15
        assert np.ptp(block_noisy) > 0.0

    def test_mixture_interpolates_block_contrast(self):
        # Contrast between block means and the global mean shrinks as the
        # noise weight grows, for several seeds.
        def contrast(eps, seed):
            spec = PlantedSpec(
                n_rows=80, n_cols=50, row_clusters=5, col_clusters=3,
                noise_eps=eps, seed=seed,
            )
            dist, phi, psi = gen_planted(spec)
            dense = dist.dense()
            block_means = np.array([
                dense[np.ix_(phi == r, psi == c)].mean()
                for r in range(5) for c in range(3)
            ])
            return np.ptp(block_means) / dense.mean()

        for seed in (0, 1, 2):
            c0 = contrast(0.0, seed)
            c_half = contrast(0.5, seed)
            c1 = contrast(1.0, seed)
            assert c1 < c_half < c0

    def test_valid_distribution_for_every_seed(self):
        for seed in range(10):
            spec = PlantedSpec(
                n_rows=20, n_cols=15, row_clusters=4, col_clusters=3,
                noise_eps=0.5, seed=seed,
            )
            dist, _, _ = gen_planted(spec)
            assert abs(dist.dense().sum() - 1.0) <= 1e-9

    def test_ground_truth_is_free_at_zero_coupling(self):
        spec = PlantedSpec(n_rows=20, n_cols=12, row_clusters=4, col_clusters=3, seed=2)
        dist, phi, psi = gen_planted(spec)
        cc = CoClustering(phi, psi, 4, 3)
        assert cost_beta(dist, cc, 0.0).total <= 1e-10

    def test_seed_determinism(self):
        spec = PlantedSpec(
            n_rows=15, n_cols=10, row_clusters=3, col_clusters=2, noise_eps=0.3, seed=9
        )
        a, _, _ = gen_planted(spec)
        b, _, _ = gen_planted(spec)
        assert np.array_equal(a.dense(), b.dense())

    def test_explicit_boundaries(self):
        spec = PlantedSpec(
            n_rows=6, n_cols=4, row_clusters=2, col_clusters=2,
            row_boundaries=(2, 6), col_boundaries=(1, 4), seed=0,
        )
        _, phi, psi = gen_planted(spec)
        assert phi.tolist() == [0, 0, 1, 1, 1, 1]
        assert psi.tolist() == [0, 1, 1, 1]

    def test_bad_boundaries_rejected(self):
        spec = PlantedSpec(
            n_rows=6, n_cols=4, row_clusters=2, col_clusters=2,
            row_boundaries=(2, 5),
        )
        with pytest.raises(InvalidBoundaries):
            gen_planted(spec)

    def test_bad_eps_rejected(self):
        with pytest.raises(InvalidBoundaries):
            PlantedSpec(n_rows=4, n_cols=4, row_clusters=2, col_clusters=2, noise_eps=1.5)


class TestCirculant:
    def test_full_width_blocks_uniform(self):
        dist, phi, psi = gen_circulant(CirculantSpec(k=30))
        dense = dist.dense()
        block = dense[:30, :30]
        assert np.allclose(block, 1.0 / 2700.0)
        assert block.sum() == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert np.allclose(dense[:30, 30:], 0.0)

    def test_width_one_is_permutation_like(self):
        dist, _, _ = gen_circulant(CirculantSpec(k=1))
        dense = dist.dense()
        assert ((dense > 0).sum(axis=1) == 1).all()
        assert np.allclose(dense[dense > 0], 1.0 / 90.0)

    def test_width_three_structure(self):
        dist, _, _ = gen_circulant(CirculantSpec(k=3))
        dense = dist.dense()
        assert ((dense > 0).sum(axis=1) == 3).all()
        assert np.allclose(dense[dense > 0], 1.0 / 270.0)
        n_comp, _ = connected_components(dense)
        assert n_comp == 3

    def test_row_sums(self):
        for k in (1, 7, 15, 30):
            dist, _, _ = gen_circulant(CirculantSpec(k=k))
            assert np.allclose(dist.dense().sum(axis=1), 1.0 / 90.0)

    def test_ground_truth_is_free_at_zero_coupling(self):
        dist, phi, psi = gen_circulant(CirculantSpec(k=30))
        cc = CoClustering(phi, psi, 3, 3)
        assert cost_beta(dist, cc, 0.0).total <= 1e-10

    def test_k_out_of_range(self):
        with pytest.raises(KOutOfRange):
            CirculantSpec(k=0)
        with pytest.raises(KOutOfRange):
            CirculantSpec(k=31)

    def test_smoothing_connects_graph(self):
        dist, _, _ = gen_circulant(CirculantSpec(k=3), smooth_eps=1e-6)
        n_comp, _ = connected_components(dist.dense())
        assert n_comp == 1


class TestSmooth:
    def test_preserves_total_and_positivity(self, rng):
        mat = np.zeros((4, 5))
        mat[0, 0] = 2.0
        mat[3, 4] = 2.0
        out = smooth(mat, 1e-6)
        assert out.sum() == pytest.approx(mat.sum(), abs=1e-12)
        assert (out > 0).all()
        assert np.abs(out - mat).max() <= 1e-6 * mat.sum()


class TestFixtures:
    def test_catalogue_names(self):
        names = set(fixtures())
        assert names == {
            "stuck_3x4",
            "tall_8x4",
            "entropy_trade_a",
            "entropy_trade_b",
            "southern_women",
        }

    def test_stuck_matrix_cells(self):
        fx = fixture("stuck_3x4")
        expected = np.zeros((3, 4))
        for pos in [(0, 0), (1, 1), (2, 2), (2, 3)]:
            expected[pos] = 0.25
        assert np.array_equal(fx.matrix, expected)

    def test_trade_matrix_cells(self):
        fx = fixture("entropy_trade_a")
        assert np.array_equal(
            fx.matrix, [[0.12, 0.0, 0.0], [0.0, 0.39, 0.05], [0.0, 0.05, 0.39]]
        )

    def test_southern_women_shape_and_degrees(self):
        fx = fixture("southern_women")
        mat = fx.matrix
        assert mat.shape == (18, 14)
        assert set(np.unique(mat)) == {0.0, 1.0}
        # First woman participates in 8 events; totals match the edge list.
        assert mat[0].sum() == 8
        assert mat.sum() == 93
        assert mat.sum(axis=0).tolist() == [3, 3, 6, 4, 8, 8, 10, 14, 12, 6, 4, 7, 4, 4]

    def test_all_fixture_distributions_normalize(self):
        for fx in fixtures().values():
            dist = fx.distribution()
            assert abs(dist.dense().sum() - 1.0) <= 1e-9
            for cc in fx.clusterings.values():
                cc.matches(dist)

    def test_unknown_fixture(self):
        with pytest.raises(KeyError):
            fixture("nope")
