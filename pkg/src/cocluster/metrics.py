"""Clustering quality scores against hard or multi-label ground truth.

`map_score` is the micro-averaged precision: the fraction of correctly
clustered elements under the best relabeling of predicted clusters, i.e.

    max over permutations pi of  sum_j |pred^-1(j) & truth^-1(pi(j))| / n.

The permutation maximum is found by optimal assignment on the overlap
count matrix, which coincides with brute-force enumeration because the
objective is a sum of independent cell overlaps. `map_prime` (purity)
drops the permutation constraint: every predicted cluster just claims
its best-matching label, labels may be reused, and elements may carry
several admissible labels.
"""

from __future__ import annotations

from collections import Counter

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ClusterCountMismatch, LengthMismatch


def _as_labels(a, name):
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise LengthMismatch(f"{name} must be a nonempty 1-D label array")
    if arr.min() < 0:
        raise LengthMismatch(f"{name} contains negative label ids")
    return arr


def overlap_matrix(pred, truth, n_pred_clusters=None, n_truth_clusters=None) -> np.ndarray:
    """Count table: entry (j, i) = number of elements in predicted cluster j
    with true cluster i. Row sums are the predicted cluster sizes."""
    pred = _as_labels(pred, "pred")
    truth = _as_labels(truth, "truth")
    if pred.size != truth.size:
        raise LengthMismatch(f"pred covers {pred.size} elements, truth {truth.size}")
    kp = int(n_pred_clusters) if n_pred_clusters is not None else int(pred.max()) + 1
    kt = int(n_truth_clusters) if n_truth_clusters is not None else int(truth.max()) + 1
    counts = np.zeros((kp, kt), dtype=np.int64)
    np.add.at(counts, (pred, truth), 1)
    return counts


def map_score(pred, truth, n_clusters=None) -> float:
    """Micro-averaged precision of a hard clustering in [0, 1].

    Requires the prediction and the ground truth to use the same number
    of cluster ids; empty predicted ids still count as permutation slots
    with zero overlap. Pass n_clusters when the prediction may leave its
    highest ids unused.
    """
    pred = _as_labels(pred, "pred")
    truth = _as_labels(truth, "truth")
    if pred.size != truth.size:
        raise LengthMismatch(f"pred covers {pred.size} elements, truth {truth.size}")
    kt = int(truth.max()) + 1
    kp = int(n_clusters) if n_clusters is not None else int(pred.max()) + 1
    if int(pred.max()) >= kp:
        raise ClusterCountMismatch(f"prediction id {int(pred.max())} outside [0, {kp})")
    if kp != kt:
        raise ClusterCountMismatch(f"prediction uses {kp} cluster ids, truth {kt}")
    counts = overlap_matrix(pred, truth, kp, kt)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return float(counts[rows, cols].sum()) / pred.size


def map_prime(pred, truth_labels) -> float:
    """Purity of a clustering against multi-label ground truth, in [0, 1].

    truth_labels holds one nonempty collection of admissible labels per
    element. Each predicted cluster counts the single label shared by
    most of its members (an element matches through any of its labels);
    different clusters may claim the same label.
    """
    pred = _as_labels(pred, "pred")
    labels = [frozenset(s) for s in truth_labels]
    if pred.size != len(labels):
        raise LengthMismatch(f"pred covers {pred.size} elements, truth {len(labels)}")
    if any(len(s) == 0 for s in labels):
        raise LengthMismatch("every element needs at least one admissible label")
    matched = 0
    for j in np.unique(pred):
        tally = Counter()
        for e in np.flatnonzero(pred == j):
            tally.update(labels[e])
        matched += max(tally.values())
    return matched / pred.size
