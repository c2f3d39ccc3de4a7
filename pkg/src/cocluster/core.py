"""Probability-table data model and information-theoretic primitives.

Everything is measured in bits (base-2 logarithms) and follows the
0*log(0) = 0 convention. A nonnegative data matrix is normalized into a
joint distribution over its rows and columns; entropies, mutual
informations, and the information loss incurred by deterministically
merging symbols are computed from that table.

All types defined here are immutable after construction and all
operations are pure, so instances can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cs_connected_components

from .errors import (
    DimensionMismatch,
    EmptyRowOrCol,
    NegativeEntry,
    NonFinite,
    NotADistribution,
    NumericalInconsistency,
    ZeroMatrix,
)

#: Tolerance on "sums to one" checks.
SUM_TOL = 1e-9

#: Cancellation noise at or below this magnitude is clamped to zero;
#: anything more negative raises NumericalInconsistency.
CLAMP_TOL = 1e-10

#: Above this nonzero density a table is treated as effectively dense.
DENSE_THRESHOLD = 0.25


def plog2(values):
    """Elementwise -v * log2(v) with the 0*log(0) = 0 convention.

    Nonpositive inputs contribute 0, which also absorbs the tiny negative
    residues left behind by floating-point cancellation.
    """
    v = np.atleast_1d(np.asarray(values, dtype=float))
    out = np.zeros_like(v)
    mask = v > 0.0
    vm = v[mask]
    out[mask] = -vm * np.log2(vm)
    return out


def _clamp_nonneg(value, what):
    """Clamp tiny negative rounding noise to 0; reject real negatives."""
    if value < 0.0:
        if value < -CLAMP_TOL:
            raise NumericalInconsistency(f"{what} = {value} is negative beyond rounding noise")
        return 0.0
    return float(value)


def _validate_raw(raw) -> np.ndarray:
    """Shared preconditions for matrix-consuming operations."""
    mat = np.asarray(raw, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {mat.shape}")
    bad = ~np.isfinite(mat)
    if bad.any():
        pos = np.argwhere(bad)[0]
        raise NonFinite((int(pos[0]), int(pos[1])), mat[pos[0], pos[1]])
    neg = mat < 0.0
    if neg.any():
        pos = np.argwhere(neg)[0]
        raise NegativeEntry((int(pos[0]), int(pos[1])), float(mat[pos[0], pos[1]]))
    if mat.sum() <= 0.0:
        raise ZeroMatrix("matrix sums to zero")
    return mat


class JointDistribution:
    """A normalized nonnegative probability table over rows x columns.

    Nonzero cells are stored sparsely (CSR plus a CSC twin for fast
    column access); `dense()` materializes the full table. Marginals are
    precomputed at construction. Instances are read-only.
    """

    __slots__ = ("n_rows", "n_cols", "_csr", "_csc", "row_marginal", "col_marginal")

    def __init__(self, matrix):
        mat = np.asarray(matrix, dtype=float)
        self.n_rows, self.n_cols = mat.shape
        total = mat.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise NotADistribution(f"entries sum to {total}, expected 1")
        self._csr = sp.csr_matrix(mat)
        self._csr.eliminate_zeros()
        self._csr.sum_duplicates()
        self._csc = self._csr.tocsc()
        self.row_marginal = np.asarray(self._csr.sum(axis=1)).ravel()
        self.col_marginal = np.asarray(self._csr.sum(axis=0)).ravel()
        if (self.row_marginal <= 0.0).any():
            raise EmptyRowOrCol("row", int(np.argmin(self.row_marginal > 0.0)))
        if (self.col_marginal <= 0.0).any():
            raise EmptyRowOrCol("col", int(np.argmin(self.col_marginal > 0.0)))
        self.row_marginal.setflags(write=False)
        self.col_marginal.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    @property
    def density(self) -> float:
        return self.nnz / (self.n_rows * self.n_cols)

    @property
    def is_dense(self) -> bool:
        return self.density > DENSE_THRESHOLD

    def dense(self) -> np.ndarray:
        """Dense view of the probability table (fresh writable copy)."""
        return self._csr.toarray()

    def prob(self, row: int, col: int) -> float:
        """Probability of a single cell (0.0 for absent entries)."""
        return float(self._csr[row, col])

    def row_nonzeros(self, i: int):
        """(column indices, values) of row i's nonzero cells."""
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[lo:hi], self._csr.data[lo:hi]

    def col_nonzeros(self, j: int):
        """(row indices, values) of column j's nonzero cells."""
        lo, hi = self._csc.indptr[j], self._csc.indptr[j + 1]
        return self._csc.indices[lo:hi], self._csc.data[lo:hi]

    def nonzero_items(self):
        """(row, col, value) triplets in row-major order."""
        coo = self._csr.tocoo()
        return zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())

    def mutual_information(self) -> float:
        """I(rows; cols) in bits, summed over nonzero cells only."""
        coo = self._csr.tocoo()
        ratio = coo.data / (self.row_marginal[coo.row] * self.col_marginal[coo.col])
        value = float(np.sum(coo.data * np.log2(ratio)))
        return _clamp_nonneg(value, "mutual information")

    def __repr__(self):
        return f"JointDistribution(shape={self.shape}, nnz={self.nnz})"


def normalize(raw) -> JointDistribution:
    """Scale a nonnegative matrix so its entries sum to one.

    Raises NegativeEntry / NonFinite with the offending position,
    ZeroMatrix for an all-zero input, and EmptyRowOrCol when a row or
    column has no mass.
    """
    mat = _validate_raw(raw)
    return JointDistribution(mat / mat.sum())


class CoClustering:
    """A pair of assignment maps: rows -> row clusters, cols -> col clusters.

    Assignments are total (every element has a cluster id in range);
    clusters are allowed to be empty, and the number of nonempty clusters
    is queryable. Instances are read-only; derive modified copies via
    `with_assignments`.
    """

    __slots__ = ("phi", "psi", "n_row_clusters", "n_col_clusters")

    def __init__(self, phi, psi, n_row_clusters=None, n_col_clusters=None):
        phi = np.asarray(phi, dtype=np.int64).copy()
        psi = np.asarray(psi, dtype=np.int64).copy()
        if phi.ndim != 1 or psi.ndim != 1 or phi.size < 1 or psi.size < 1:
            raise DimensionMismatch("assignments must be nonempty 1-D arrays")
        kr = int(n_row_clusters) if n_row_clusters is not None else int(phi.max()) + 1
        kc = int(n_col_clusters) if n_col_clusters is not None else int(psi.max()) + 1
        if kr < 1 or kc < 1:
            raise DimensionMismatch("cluster counts must be >= 1")
        if phi.min() < 0 or phi.max() >= kr:
            raise DimensionMismatch(f"row assignment ids must lie in [0, {kr})")
        if psi.min() < 0 or psi.max() >= kc:
            raise DimensionMismatch(f"col assignment ids must lie in [0, {kc})")
        phi.setflags(write=False)
        psi.setflags(write=False)
        self.phi = phi
        self.psi = psi
        self.n_row_clusters = kr
        self.n_col_clusters = kc

    @classmethod
    def identity(cls, n_rows: int, n_cols: int) -> "CoClustering":
        return cls(np.arange(n_rows), np.arange(n_cols), n_rows, n_cols)

    @classmethod
    def constant(cls, n_rows: int, n_cols: int) -> "CoClustering":
        return cls(np.zeros(n_rows, dtype=np.int64), np.zeros(n_cols, dtype=np.int64), 1, 1)

    @property
    def n_rows(self) -> int:
        return self.phi.size

    @property
    def n_cols(self) -> int:
        return self.psi.size

    def used_row_ids(self) -> set[int]:
        return set(np.unique(self.phi).tolist())

    def used_col_ids(self) -> set[int]:
        return set(np.unique(self.psi).tolist())

    @property
    def n_nonempty_row_clusters(self) -> int:
        return int(np.unique(self.phi).size)

    @property
    def n_nonempty_col_clusters(self) -> int:
        return int(np.unique(self.psi).size)

    def with_assignments(self, phi=None, psi=None) -> "CoClustering":
        """Copy with one or both assignment arrays replaced."""
        return CoClustering(
            self.phi if phi is None else phi,
            self.psi if psi is None else psi,
            self.n_row_clusters,
            self.n_col_clusters,
        )

    def matches(self, dist: JointDistribution) -> None:
        if self.n_rows != dist.n_rows or self.n_cols != dist.n_cols:
            raise DimensionMismatch(
                f"clustering over {self.n_rows}x{self.n_cols} elements does not "
                f"match a {dist.n_rows}x{dist.n_cols} distribution"
            )

    def __eq__(self, other):
        return (
            isinstance(other, CoClustering)
            and self.n_row_clusters == other.n_row_clusters
            and self.n_col_clusters == other.n_col_clusters
            and np.array_equal(self.phi, other.phi)
            and np.array_equal(self.psi, other.psi)
        )

    def __repr__(self):
        return (
            f"CoClustering({self.n_rows} rows -> {self.n_row_clusters} clusters, "
            f"{self.n_cols} cols -> {self.n_col_clusters} clusters)"
        )


@dataclass(frozen=True)
class AggregateStats:
    """Aggregated joints and marginals for a clustering of a distribution.

    Holds p(row cluster, col cluster), p(row, col cluster),
    p(row cluster, col), the cluster marginals, and the cached mutual
    information of the unclustered table.
    """

    p_rcluster_ccluster: np.ndarray  # |rowclusters| x |colclusters|
    p_row_ccluster: np.ndarray       # |rows| x |colclusters|
    p_rcluster_col: np.ndarray       # |rowclusters| x |cols|
    row_cluster_marginal: np.ndarray
    col_cluster_marginal: np.ndarray
    mi_xy: float

    def __post_init__(self):
        for arr in (
            self.p_rcluster_ccluster,
            self.p_row_ccluster,
            self.p_rcluster_col,
            self.row_cluster_marginal,
            self.col_cluster_marginal,
        ):
            arr.setflags(write=False)


def entropy(p) -> float:
    """Shannon entropy H(p) in bits of a probability vector."""
    v = np.asarray(p, dtype=float).ravel()
    if (v < 0.0).any():
        raise NotADistribution("negative probability entry")
    total = v.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise NotADistribution(f"probabilities sum to {total}, expected 1")
    return float(plog2(v).sum())


def mutual_information(joint) -> float:
    """I between the axes of a 2-D probability table, in bits."""
    table = np.asarray(joint, dtype=float)
    if table.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D table, got shape {table.shape}")
    if (table < 0.0).any():
        raise NotADistribution("negative probability entry")
    total = table.sum()
    if abs(total - 1.0) > SUM_TOL:
        raise NotADistribution(f"table sums to {total}, expected 1")
    px = table.sum(axis=1)
    py = table.sum(axis=0)
    rows, cols = np.nonzero(table)
    vals = table[rows, cols]
    value = float(np.sum(vals * np.log2(vals / (px[rows] * py[cols]))))
    return _clamp_nonneg(value, "mutual information")


def aggregate(dist: JointDistribution, cc: CoClustering) -> AggregateStats:
    """Sum the probability table over cluster preimages.

    Produces the clustered joint p(row cluster, col cluster) together
    with the two half-aggregated tables, their marginals, and the cached
    mutual information of the input table.
    """
    cc.matches(dist)
    kr, kc = cc.n_row_clusters, cc.n_col_clusters
    coo = dist._csr.tocoo()
    rc = cc.phi[coo.row]
    ccid = cc.psi[coo.col]

    p_rcluster_ccluster = np.zeros((kr, kc))
    np.add.at(p_rcluster_ccluster, (rc, ccid), coo.data)
    p_row_ccluster = np.zeros((dist.n_rows, kc))
    np.add.at(p_row_ccluster, (coo.row, ccid), coo.data)
    p_rcluster_col = np.zeros((kr, dist.n_cols))
    np.add.at(p_rcluster_col, (rc, coo.col), coo.data)

    return AggregateStats(
        p_rcluster_ccluster=p_rcluster_ccluster,
        p_row_ccluster=p_row_ccluster,
        p_rcluster_col=p_rcluster_col,
        row_cluster_marginal=p_rcluster_ccluster.sum(axis=1),
        col_cluster_marginal=p_rcluster_ccluster.sum(axis=0),
        mi_xy=dist.mutual_information(),
    )


def relevant_information_loss(joint, zeta) -> float:
    """Information about the row variable destroyed by merging columns.

    For a joint table of (S, Z) and a total assignment `zeta` over Z's
    alphabet, returns I(S; Z) - I(S; zeta(Z)) >= 0 in bits. Tiny negative
    rounding noise is clamped to zero.
    """
    table = np.asarray(joint, dtype=float)
    if table.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D table, got shape {table.shape}")
    z = np.asarray(zeta, dtype=np.int64)
    if z.ndim != 1 or z.size != table.shape[1]:
        raise DimensionMismatch(
            f"assignment covers {z.size} symbols but the table has {table.shape[1]} columns"
        )
    if z.min() < 0:
        raise DimensionMismatch("assignment ids must be nonnegative")
    k = int(z.max()) + 1
    merged = np.zeros((table.shape[0], k))
    np.add.at(merged.T, z, table.T)
    value = mutual_information(table) - mutual_information(merged)
    return _clamp_nonneg(value, "relevant information loss")


def connected_components(raw):
    """Connected components of the bipartite graph with edges at nonzero cells.

    Returns (n_components, labels) where labels covers the row nodes
    first, then the column nodes. One component means the random walk on
    the graph is irreducible.
    """
    mat = _validate_raw(raw)
    n, m = mat.shape
    block = sp.csr_matrix(mat)
    adj = sp.bmat([[None, block], [block.T, None]], format="csr")
    n_comp, labels = _cs_connected_components(adj, directed=False)
    return int(n_comp), labels
