"""Slow, independent reference implementations used to check the package.

Everything here is written the dumbest defensible way (dense tables,
explicit loops, enumeration) and must not share code with the library
paths it validates.
"""

import itertools

import numpy as np


def entropy_bits(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mi_bits(table):
    table = np.asarray(table, dtype=float)
    px = table.sum(axis=1)
    py = table.sum(axis=0)
    return entropy_bits(px) + entropy_bits(py) - entropy_bits(table.ravel())


def aggregate_dense(table, phi, psi, kr, kc):
    out = np.zeros((kr, kc))
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            out[phi[i], psi[j]] += table[i, j]
    return out


def aggregate_rows(table, phi, kr):
    out = np.zeros((kr, table.shape[1]))
    for i in range(table.shape[0]):
        out[phi[i]] += table[i]
    return out


def cost_total(table, phi, psi, kr, kc, beta):
    """Four-loss cost evaluated from dense tables, the slow way."""
    i_xy = mi_bits(table)
    i_rc_y = mi_bits(aggregate_rows(table, phi, kr))
    i_x_cc = mi_bits(aggregate_rows(table.T, psi, kc))
    i_rc_cc = mi_bits(aggregate_dense(table, phi, psi, kr, kc))
    return beta * (2 * i_xy - i_x_cc - i_rc_y) + (1 - beta) * (i_rc_y + i_x_cc - 2 * i_rc_cc)


def map_bruteforce(pred, truth, k):
    """Best-permutation overlap fraction by full enumeration."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    best = 0
    for perm in itertools.permutations(range(k)):
        hits = sum(1 for p, t in zip(pred, truth) if perm[p] == t)
        best = max(best, hits)
    return best / pred.size


def random_distribution(rng, n, m, density=1.0):
    """Random normalized table; strictly positive when density is 1."""
    mat = rng.random((n, m)) + 1e-3
    if density < 1.0:
        mask = rng.random((n, m)) < density
        # Keep every row and column occupied.
        for i in range(n):
            if not mask[i].any():
                mask[i, rng.integers(m)] = True
        for j in range(m):
            if not mask[:, j].any():
                mask[rng.integers(n), j] = True
        mat = mat * mask
    return mat / mat.sum()


def random_assignment(rng, n, k):
    """Total assignment using every id at least once (k <= n)."""
    out = np.empty(n, dtype=np.int64)
    perm = rng.permutation(n)
    out[perm[:k]] = np.arange(k)
    if n > k:
        out[perm[k:]] = rng.integers(0, k, n - k)
    return out
