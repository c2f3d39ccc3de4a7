import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocluster import map_prime, map_score, overlap_matrix
from cocluster.errors import ClusterCountMismatch, LengthMismatch

from oracles import map_bruteforce, random_assignment


class TestOverlapMatrix:
    def test_diagonal_for_equal_labelings(self):
        counts = overlap_matrix([0, 0, 1, 1, 2], [0, 0, 1, 1, 2])
        assert np.array_equal(counts, np.diag([2, 2, 1]))

    def test_constant_prediction_single_row(self):
        counts = overlap_matrix([0, 0, 0, 0], [0, 0, 1, 1])
        assert np.array_equal(counts, [[2, 2]])

    def test_row_sums_are_cluster_sizes(self, rng):
        pred = random_assignment(rng, 30, 4)
        truth = random_assignment(rng, 30, 3)
        counts = overlap_matrix(pred, truth)
        assert np.array_equal(counts.sum(axis=1), np.bincount(pred, minlength=4))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            overlap_matrix([0, 1], [0, 1, 1])


class TestMapScore:
    def test_exact_match(self):
        assert map_score([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0

    def test_permuted_labels(self):
        assert map_score([1, 1, 0, 0], [0, 0, 1, 1]) == 1.0

    def test_partial_overlap(self):
        # Best permutation maps predicted 1 -> truth 0 and 0 -> truth 1,
        # matching 3 of 4 elements.
        assert map_score([1, 1, 1, 0], [0, 0, 1, 1]) == 0.75

    def test_cluster_count_mismatch(self):
        with pytest.raises(ClusterCountMismatch):
            map_score([0, 1, 2, 0], [0, 1, 1, 0])

    def test_declared_empty_clusters_count_as_slots(self):
        # Prediction only uses ids {0, 1} but declares 3 clusters, so it
        # remains comparable with a 3-cluster truth.
        score = map_score([0, 0, 1, 1], [0, 0, 1, 2], n_clusters=3)
        assert score == 0.75

    def test_matches_bruteforce_enumeration(self, rng):
        for _ in range(500):
            n = int(rng.integers(4, 16))
            k = int(rng.integers(2, 7))
            if k > n:
                continue
            pred = random_assignment(rng, n, k)
            truth = random_assignment(rng, n, k)
            assert map_score(pred, truth) == map_bruteforce(pred, truth, k)

    def test_permutation_invariance(self, rng):
        for _ in range(500):
            n = int(rng.integers(4, 20))
            k = int(rng.integers(2, 6))
            if k > n:
                continue
            pred = random_assignment(rng, n, k)
            truth = random_assignment(rng, n, k)
            base = map_score(pred, truth)
            sigma = rng.permutation(k)
            tau = rng.permutation(k)
            assert map_score(sigma[pred], tau[truth]) == base

    @given(st.integers(2, 5), st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_bounds_and_perfection_criterion(self, k, seed):
        rng = np.random.default_rng(seed)
        n = k + int(rng.integers(0, 12))
        pred = random_assignment(rng, n, k)
        truth = random_assignment(rng, n, k)
        score = map_score(pred, truth)
        assert 1.0 / k <= score <= 1.0
        if score == 1.0:
            # Perfect score means the prediction is a relabeling of truth.
            mapping = {}
            for p, t in zip(pred, truth):
                assert mapping.setdefault(int(p), int(t)) == int(t)


class TestMapPrime:
    def test_single_labels_exact(self):
        labels = [{0}, {0}, {1}, {1}]
        assert map_prime([0, 0, 1, 1], labels) == 1.0

    def test_shared_label_saturates(self):
        labels = [{7, 0}, {7, 1}, {7, 2}, {7}]
        assert map_prime([0, 1, 1, 0], labels) == 1.0

    def test_per_cluster_best_label(self):
        labels = [{0}, {0}, {1}, {1}]
        # Cluster 0 = {element 0} matches label 0; cluster 1 = {1,2,3}
        # matches label 1 twice.
        assert map_prime([0, 1, 1, 1], labels) == 0.75

    def test_label_reuse_across_clusters(self):
        labels = [{5}, {5}, {5}, {5}]
        assert map_prime([0, 1, 2, 3], labels) == 1.0

    def test_at_least_map_score_on_hard_truth(self, rng):
        for _ in range(200):
            n = int(rng.integers(4, 20))
            k = int(rng.integers(2, 5))
            if k > n:
                continue
            pred = random_assignment(rng, n, k)
            truth = random_assignment(rng, n, k)
            hard = map_score(pred, truth)
            soft = map_prime(pred, [{int(t)} for t in truth])
            assert soft >= hard - 1e-12

    def test_empty_label_set_rejected(self):
        with pytest.raises(LengthMismatch):
            map_prime([0, 1], [{0}, set()])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            map_prime([0, 1, 0], [{0}, {1}])
