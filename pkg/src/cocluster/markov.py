"""Random walk on the bipartite graph of a nonnegative matrix.

The walk alternates between row nodes and column nodes with transition
probabilities proportional to the edge weights, so it is 2-periodic and
reversible. Its stationary pair distribution gives an independent route
to the co-clustering cost: aggregating the walk's state space under a
map that keeps row nodes and column nodes in separate clusters yields an
aggregation cost whose doubling equals the table-side cost. That
identity is the central correctness oracle of this package.

Types here are immutable after construction and all evaluations are
pure.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .core import (
    CoClustering,
    JointDistribution,
    connected_components,
    mutual_information,
    normalize,
    relevant_information_loss,
    _validate_raw,
)
from .cost import _check_beta, cost_beta
from .errors import DimensionMismatch, MutualExclusivityViolation, Reducible, ZeroDegreeNode


class BipartiteChain:
    """Transition matrix and invariant distribution of the bipartite walk.

    States 0..n_x-1 are row nodes, states n_x..n_x+n_y-1 are column
    nodes. The transition matrix is row stochastic with support only on
    cross-side moves; the invariant distribution is half the row
    marginal on row nodes and half the column marginal on column nodes.
    """

    __slots__ = ("n_x", "n_y", "transition", "invariant", "dist")

    def __init__(self, dist: JointDistribution):
        n, m = dist.shape
        p = dist._csr
        row_cond = sp.diags(1.0 / dist.row_marginal) @ p       # P(Y=j | X=i)
        col_cond = (sp.diags(1.0 / dist.col_marginal) @ p.T.tocsr())  # P(X=i | Y=j)
        self.n_x = n
        self.n_y = m
        self.dist = dist
        self.transition = sp.bmat(
            [[None, row_cond], [col_cond, None]], format="csr"
        )
        self.invariant = 0.5 * np.concatenate([dist.row_marginal, dist.col_marginal])
        self.invariant.setflags(write=False)
        self._verify_invariant()

    @property
    def n_states(self) -> int:
        return self.n_x + self.n_y

    def _verify_invariant(self) -> None:
        residual = np.abs(self.transition.T @ self.invariant - self.invariant).max()
        if residual > 1e-10:
            raise DimensionMismatch(
                f"stationarity residual {residual} exceeds tolerance"
            )

    def pair_distribution(self) -> np.ndarray:
        """Joint distribution of two consecutive walk states, dense.

        Entry (s, t) is invariant[s] * transition[s, t]; the off-diagonal
        blocks are half the probability table and its transpose.
        """
        n = self.n_x
        table = self.dist.dense()
        pair = np.zeros((self.n_states, self.n_states))
        pair[:n, n:] = 0.5 * table
        pair[n:, :n] = 0.5 * table.T
        return pair

    def __repr__(self):
        return f"BipartiteChain({self.n_x}+{self.n_y} states)"


class AggregationMap:
    """A merging of walk states that never mixes the two sides.

    Row nodes map into ids [0, n_row_clusters) and column nodes into
    ids [n_row_clusters, n_row_clusters + n_col_clusters), which makes
    the mutual-exclusivity constraint structural.
    """

    __slots__ = ("zeta", "n_x", "side_marker", "n_ids")

    def __init__(self, zeta, n_x: int, side_marker: int, n_ids=None):
        zeta = np.asarray(zeta, dtype=np.int64).copy()
        if zeta.ndim != 1 or not 0 < n_x < zeta.size:
            raise DimensionMismatch("zeta must cover both sides of the state space")
        if zeta.min() < 0:
            raise DimensionMismatch("aggregated ids must be nonnegative")
        x_ids = set(zeta[:n_x].tolist())
        y_ids = set(zeta[n_x:].tolist())
        if x_ids & y_ids:
            raise MutualExclusivityViolation(
                f"ids {sorted(x_ids & y_ids)} receive both row and column nodes"
            )
        if max(x_ids) >= side_marker or min(y_ids) < side_marker:
            raise MutualExclusivityViolation(
                f"row-node ids must lie below the side marker {side_marker} "
                "and column-node ids at or above it"
            )
        zeta.setflags(write=False)
        self.zeta = zeta
        self.n_x = n_x
        self.side_marker = side_marker
        self.n_ids = int(n_ids) if n_ids is not None else int(zeta.max()) + 1

    @classmethod
    def from_coclustering(cls, cc: CoClustering) -> "AggregationMap":
        zeta = np.concatenate([cc.phi, cc.n_row_clusters + cc.psi])
        return cls(
            zeta,
            n_x=cc.n_rows,
            side_marker=cc.n_row_clusters,
            n_ids=cc.n_row_clusters + cc.n_col_clusters,
        )


def build_chain(raw) -> BipartiteChain:
    """Construct the walk from a nonnegative matrix (normalized internally).

    Requires every node to have positive degree and the bipartite graph
    to be connected; otherwise raises ZeroDegreeNode or Reducible.
    """
    if isinstance(raw, JointDistribution):
        dist = raw
    else:
        mat = _validate_raw(raw)
        row_deg = mat.sum(axis=1)
        col_deg = mat.sum(axis=0)
        if (row_deg <= 0.0).any():
            raise ZeroDegreeNode(int(np.argmin(row_deg > 0.0)))
        if (col_deg <= 0.0).any():
            raise ZeroDegreeNode(mat.shape[0] + int(np.argmin(col_deg > 0.0)))
        dist = normalize(mat)
    n_comp, _ = connected_components(dist.dense())
    if n_comp != 1:
        raise Reducible(n_comp)
    return BipartiteChain(dist)


def _aggregate_pair(pair: np.ndarray, zeta: np.ndarray, n_ids: int, axis: int) -> np.ndarray:
    """Merge one axis of the pair distribution under zeta."""
    if axis == 0:
        out = np.zeros((n_ids, pair.shape[1]))
        np.add.at(out, zeta, pair)
    else:
        out = np.zeros((pair.shape[0], n_ids))
        np.add.at(out.T, zeta, pair.T)
    return out


def aggregation_cost_mi(chain: BipartiteChain, zmap: AggregationMap, beta) -> float:
    """Aggregation cost from its three mutual-information terms, in bits.

        beta*I(Z1;Z2) + (1-2*beta)*I(Z1;Zc2) - (1-beta)*I(Zc1;Zc2)

    where (Z1, Z2) is the stationary pair of consecutive walk states and
    Zc = zeta(Z) the aggregated state.
    """
    beta = _check_beta(beta)
    if zmap.zeta.size != chain.n_states or zmap.n_x != chain.n_x:
        raise DimensionMismatch("aggregation map does not cover this chain's state space")
    pair = chain.pair_distribution()
    z = zmap.zeta
    k = zmap.n_ids
    i_12 = mutual_information(pair)
    i_1_c2 = mutual_information(_aggregate_pair(pair, z, k, axis=1))
    i_c1_c2 = mutual_information(
        _aggregate_pair(_aggregate_pair(pair, z, k, axis=1), z, k, axis=0)
    )
    return beta * i_12 + (1.0 - 2.0 * beta) * i_1_c2 - (1.0 - beta) * i_c1_c2


def aggregation_cost_loss(chain: BipartiteChain, zmap: AggregationMap, beta) -> float:
    """Aggregation cost written as a sum of relevant information losses.

        beta * L_{Z1}(Z2 -> Zc2) + (1-beta) * L_{Zc2}(Z1 -> Zc1)

    Algebraically identical to `aggregation_cost_mi`; computed along an
    independent path so the pair serves as a self-check.
    """
    beta = _check_beta(beta)
    if zmap.zeta.size != chain.n_states or zmap.n_x != chain.n_x:
        raise DimensionMismatch("aggregation map does not cover this chain's state space")
    pair = chain.pair_distribution()
    z = zmap.zeta
    k = zmap.n_ids
    loss_z1 = relevant_information_loss(pair, z)
    merged_cols = _aggregate_pair(pair, z, k, axis=1)  # P(Z1, Zc2)
    loss_zc2 = relevant_information_loss(merged_cols.T, z)
    return beta * loss_z1 + (1.0 - beta) * loss_zc2


def consistency_residual(dist: JointDistribution, cc: CoClustering, beta) -> float:
    """|2 * chain-side aggregation cost - table-side cost| in bits.

    The two quantities agree exactly in exact arithmetic whenever the
    bipartite graph is connected; the contract is a residual <= 1e-9.
    """
    beta = _check_beta(beta)
    cc.matches(dist)
    chain = build_chain(dist)
    zmap = AggregationMap.from_coclustering(cc)
    chain_cost = aggregation_cost_mi(chain, zmap, beta)
    table_cost = cost_beta(dist, cc, beta).total
    return abs(2.0 * chain_cost - table_cost)


def invariant_by_power_iteration(chain: BipartiteChain, n_iter: int = 200) -> np.ndarray:
    """Stationary distribution via power iteration on the squared chain.

    The walk is 2-periodic, so iteration runs on the two-step chain with
    each side renormalized to mass 1/2. Cross-check only; the closed
    form is exact and is what `build_chain` installs.
    """
    mu = np.full(chain.n_states, 1.0 / chain.n_states)
    a2_t = (chain.transition @ chain.transition).T.tocsr()
    n = chain.n_x
    for _ in range(n_iter):
        mu = a2_t @ mu
        mu[:n] *= 0.5 / mu[:n].sum()
        mu[n:] *= 0.5 / mu[n:].sum()
    return mu
