"""The beta-weighted co-clustering cost and incremental move deltas.

The cost couples element-level and cluster-level variables through four
information-loss terms:

    total(beta) = beta    * (L_X(Y -> Yc) + L_Y(X -> Xc))
                + (1-beta)* (L_Xc(Y -> Yc) + L_Yc(X -> Xc))

where Xc, Yc are the clustered row/column variables and, e.g.,
L_X(Y -> Yc) = I(X;Y) - I(X;Yc) is the information about rows lost by
merging columns into column clusters. beta = 1 decouples the two sides
into a pair of one-sided bottleneck objectives; beta = 1/2 reduces to
maximizing I(Xc;Yc); beta = 0 rewards clusterings whose cluster
variables retain everything the elements know about each other.

`cost_beta` evaluates the breakdown from scratch. `MoveEvaluator` keeps
the aggregated tables and per-cluster entropy accumulators of a working
clustering so that pricing a single-element move costs
O(#clusters + nonzeros of that element) arithmetic, which is what makes
the sequential sweep practical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AggregateStats,
    CoClustering,
    JointDistribution,
    aggregate,
    entropy,
    plog2,
    _clamp_nonneg,
)
from .errors import BetaOutOfRange, IndexOutOfRange

ROW = "row"
COL = "col"

#: Candidate costs within this tolerance of the best are treated as ties.
TIE_TOL = 1e-12

#: Accumulators are rebuilt from scratch after this many applied moves
#: to bound floating-point drift.
REBUILD_EVERY = 1000


def _check_beta(beta) -> float:
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise BetaOutOfRange(f"beta = {beta} outside [0, 1]")
    return beta


@dataclass(frozen=True)
class CostBreakdown:
    """The four information-loss terms and their beta-weighted total, in bits."""

    beta: float
    loss_x_of_ybar: float     # L_X(Y -> Yc)
    loss_y_of_xbar: float     # L_Y(X -> Xc)
    loss_xbar_of_ybar: float  # L_Xc(Y -> Yc)
    loss_ybar_of_xbar: float  # L_Yc(X -> Xc)
    total: float


def _breakdown_from_mi(beta, i_xy, i_x_cc, i_rc_y, i_rc_cc) -> CostBreakdown:
    loss_x_of_ybar = _clamp_nonneg(i_xy - i_x_cc, "L_X(Y->Yc)")
    loss_y_of_xbar = _clamp_nonneg(i_xy - i_rc_y, "L_Y(X->Xc)")
    loss_xbar_of_ybar = _clamp_nonneg(i_rc_y - i_rc_cc, "L_Xc(Y->Yc)")
    loss_ybar_of_xbar = _clamp_nonneg(i_x_cc - i_rc_cc, "L_Yc(X->Xc)")
    total = beta * (loss_x_of_ybar + loss_y_of_xbar) + (1.0 - beta) * (
        loss_xbar_of_ybar + loss_ybar_of_xbar
    )
    return CostBreakdown(
        beta=beta,
        loss_x_of_ybar=loss_x_of_ybar,
        loss_y_of_xbar=loss_y_of_xbar,
        loss_xbar_of_ybar=loss_xbar_of_ybar,
        loss_ybar_of_xbar=loss_ybar_of_xbar,
        total=total,
    )


def _mi_of(table) -> float:
    px = table.sum(axis=1)
    py = table.sum(axis=0)
    return float(plog2(px).sum() + plog2(py).sum() - plog2(table).sum())


def cost_beta(dist: JointDistribution, cc: CoClustering, beta) -> CostBreakdown:
    """Evaluate the full cost breakdown from scratch."""
    beta = _check_beta(beta)
    return cost_beta_from_stats(aggregate(dist, cc), beta)


def cost_beta_from_stats(stats: AggregateStats, beta) -> CostBreakdown:
    """Cost breakdown from precomputed aggregate statistics."""
    beta = _check_beta(beta)
    return _breakdown_from_mi(
        beta,
        stats.mi_xy,
        _mi_of(stats.p_row_ccluster),
        _mi_of(stats.p_rcluster_col),
        _mi_of(stats.p_rcluster_ccluster),
    )


def cost_itcc(dist: JointDistribution, cc: CoClustering) -> float:
    """I(X;Y) - I(Xc;Yc), the fully coupled cluster-prediction objective.

    Coincides with cost_beta(dist, cc, 0.5).total.
    """
    stats = aggregate(dist, cc)
    return stats.mi_xy - _mi_of(stats.p_rcluster_ccluster)


def cost_ibcc(dist: JointDistribution, cc: CoClustering) -> float:
    """I(X;Yc) + I(Xc;Y) + I(Xc;Yc), the bottleneck-style sum objective.

    This is a merit figure (larger is better); it equals
    3*I(X;Y) - 2*cost_beta(dist, cc, 0.75).total.
    """
    stats = aggregate(dist, cc)
    return (
        _mi_of(stats.p_row_ccluster)
        + _mi_of(stats.p_rcluster_col)
        + _mi_of(stats.p_rcluster_ccluster)
    )


class MoveEvaluator:
    """Mutable working state for sequential single-element moves.

    Maintains the three aggregated tables, the cluster marginals, and
    per-cluster entropy accumulators for the current clustering.
    Candidate moves are priced without mutating state; `apply_move`
    updates the touched table slices and refreshes only the accumulators
    of the two affected clusters. Single-owner: never share an instance
    across workers.

    The tables do not depend on the coupling parameter, so one evaluator
    serves every beta (as the annealing schedule requires).
    """

    def __init__(self, dist: JointDistribution, cc: CoClustering):
        cc.matches(dist)
        self.dist = dist
        self.phi = np.array(cc.phi, dtype=np.int64)
        self.psi = np.array(cc.psi, dtype=np.int64)
        self.n_row_clusters = cc.n_row_clusters
        self.n_col_clusters = cc.n_col_clusters
        self.moves_applied = 0
        self._moves_since_rebuild = 0
        # Constants of the instance.
        self._h_x = entropy(dist.row_marginal)
        self._h_y = entropy(dist.col_marginal)
        self._i_xy = dist.mutual_information()
        self.rebuild()

    # -- state construction ---------------------------------------------

    def rebuild(self) -> None:
        """Recompute tables and entropy accumulators from scratch."""
        stats = aggregate(self.dist, self.coclustering())
        self._t_rc_y = np.array(stats.p_rcluster_col)        # p(Xc, Y)
        self._t_x_cc = np.array(stats.p_row_ccluster)        # p(X, Yc)
        self._t_rc_cc = np.array(stats.p_rcluster_ccluster)  # p(Xc, Yc)
        self._p_rc = np.array(stats.row_cluster_marginal)
        self._p_cc = np.array(stats.col_cluster_marginal)
        # Per-cluster entropy contributions; the joint entropies are
        # their sums. p(Xc,Yc) is accumulated per row cluster (column
        # moves adjust those entries directly).
        self._acc_rc_y = plog2(self._t_rc_y).sum(axis=1)
        self._acc_rc_cc = plog2(self._t_rc_cc).sum(axis=1)
        self._acc_x_cc = plog2(self._t_x_cc).sum(axis=0)
        self._h_rc_y = float(self._acc_rc_y.sum())
        self._h_rc_cc = float(self._acc_rc_cc.sum())
        self._h_x_cc = float(self._acc_x_cc.sum())
        self._h_rc = float(plog2(self._p_rc).sum())
        self._h_cc = float(plog2(self._p_cc).sum())
        self._moves_since_rebuild = 0

    def coclustering(self) -> CoClustering:
        """Immutable snapshot of the current assignments."""
        return CoClustering(self.phi, self.psi, self.n_row_clusters, self.n_col_clusters)

    def stats(self) -> AggregateStats:
        """Aggregate view of the current tables (copies)."""
        return AggregateStats(
            p_rcluster_ccluster=self._t_rc_cc.copy(),
            p_row_ccluster=self._t_x_cc.copy(),
            p_rcluster_col=self._t_rc_y.copy(),
            row_cluster_marginal=self._p_rc.copy(),
            col_cluster_marginal=self._p_cc.copy(),
            mi_xy=self._i_xy,
        )

    # -- cost from accumulators -------------------------------------------

    def _totals(self, beta, h_rc, h_cc, h_rc_y, h_x_cc, h_rc_cc):
        i_rc_y = h_rc + self._h_y - h_rc_y
        i_x_cc = self._h_x + h_cc - h_x_cc
        i_rc_cc = h_rc + h_cc - h_rc_cc
        return beta * (2.0 * self._i_xy - i_x_cc - i_rc_y) + (1.0 - beta) * (
            i_rc_y + i_x_cc - 2.0 * i_rc_cc
        )

    def current_total(self, beta) -> float:
        beta = _check_beta(beta)
        return float(
            self._totals(beta, self._h_rc, self._h_cc, self._h_rc_y, self._h_x_cc, self._h_rc_cc)
        )

    def current_breakdown(self, beta) -> CostBreakdown:
        beta = _check_beta(beta)
        i_rc_y = self._h_rc + self._h_y - self._h_rc_y
        i_x_cc = self._h_x + self._h_cc - self._h_x_cc
        i_rc_cc = self._h_rc + self._h_cc - self._h_rc_cc
        return _breakdown_from_mi(beta, self._i_xy, i_x_cc, i_rc_y, i_rc_cc)

    # -- candidate evaluation -----------------------------------------------

    def _row_context(self, i):
        cols, vals = self.dist.row_nonzeros(i)
        profile = np.bincount(self.psi[cols], weights=vals, minlength=self.n_col_clusters)
        return cols, vals, profile, float(self.dist.row_marginal[i])

    def _col_context(self, k):
        rows, vals = self.dist.col_nonzeros(k)
        profile = np.bincount(self.phi[rows], weights=vals, minlength=self.n_row_clusters)
        return rows, vals, profile, float(self.dist.col_marginal[k])

    def eval_row_moves(self, i: int, beta) -> np.ndarray:
        """Candidate totals for moving row i into each row cluster.

        Entry j is the cost of the clustering that differs only in row i
        being assigned to cluster j; entry phi[i] is exactly the current
        total. State is not mutated.
        """
        beta = _check_beta(beta)
        if not 0 <= i < self.dist.n_rows:
            raise IndexOutOfRange(f"row index {i} outside [0, {self.dist.n_rows})")
        a = int(self.phi[i])
        cols, vals, profile, w = self._row_context(i)

        sub_y = self._t_rc_y[a, cols]
        d_h_y_rm = plog2(sub_y - vals).sum() - plog2(sub_y).sum()
        d_h_cc_rm = plog2(self._t_rc_cc[a] - profile).sum() - self._acc_rc_cc[a]
        d_h_rc_rm = plog2(self._p_rc[a] - w).sum() - plog2(self._p_rc[a]).sum()

        block_y = self._t_rc_y[:, cols]
        add_y = plog2(block_y + vals).sum(axis=1) - plog2(block_y).sum(axis=1)
        add_cc = plog2(self._t_rc_cc + profile).sum(axis=1) - self._acc_rc_cc
        add_rc = plog2(self._p_rc + w) - plog2(self._p_rc)

        totals = self._totals(
            beta,
            self._h_rc + d_h_rc_rm + add_rc,
            self._h_cc,
            self._h_rc_y + d_h_y_rm + add_y,
            self._h_x_cc,
            self._h_rc_cc + d_h_cc_rm + add_cc,
        )
        totals[a] = self.current_total(beta)
        return totals

    def eval_col_moves(self, k: int, beta) -> np.ndarray:
        """Candidate totals for moving column k into each column cluster."""
        beta = _check_beta(beta)
        if not 0 <= k < self.dist.n_cols:
            raise IndexOutOfRange(f"col index {k} outside [0, {self.dist.n_cols})")
        a = int(self.psi[k])
        rows, vals, profile, w = self._col_context(k)

        sub_x = self._t_x_cc[rows, a]
        d_h_x_rm = plog2(sub_x - vals).sum() - plog2(sub_x).sum()
        d_h_cc_rm = plog2(self._t_rc_cc[:, a] - profile).sum() - plog2(self._t_rc_cc[:, a]).sum()
        d_h_cc_marg_rm = plog2(self._p_cc[a] - w).sum() - plog2(self._p_cc[a]).sum()

        block_x = self._t_x_cc[rows, :]
        add_x = plog2(block_x + vals[:, None]).sum(axis=0) - plog2(block_x).sum(axis=0)
        add_cc = plog2(self._t_rc_cc + profile[:, None]).sum(axis=0) - plog2(self._t_rc_cc).sum(
            axis=0
        )
        add_marg = plog2(self._p_cc + w) - plog2(self._p_cc)

        totals = self._totals(
            beta,
            self._h_rc,
            self._h_cc + d_h_cc_marg_rm + add_marg,
            self._h_rc_y,
            self._h_x_cc + d_h_x_rm + add_x,
            self._h_rc_cc + d_h_cc_rm + add_cc,
        )
        totals[a] = self.current_total(beta)
        return totals

    def eval_row_move(self, i: int, j: int, beta) -> float:
        """Cost of the clustering with only row i moved to cluster j."""
        if not 0 <= i < self.dist.n_rows:
            raise IndexOutOfRange(f"row index {i} outside [0, {self.dist.n_rows})")
        if not 0 <= j < self.n_row_clusters:
            raise IndexOutOfRange(f"row cluster {j} outside [0, {self.n_row_clusters})")
        if j == self.phi[i]:
            return self.current_total(beta)
        return float(self.eval_row_moves(i, beta)[j])

    def eval_col_move(self, k: int, l: int, beta) -> float:
        """Cost of the clustering with only column k moved to cluster l."""
        if not 0 <= k < self.dist.n_cols:
            raise IndexOutOfRange(f"col index {k} outside [0, {self.dist.n_cols})")
        if not 0 <= l < self.n_col_clusters:
            raise IndexOutOfRange(f"col cluster {l} outside [0, {self.n_col_clusters})")
        if l == self.psi[k]:
            return self.current_total(beta)
        return float(self.eval_col_moves(k, beta)[l])

    # -- state mutation ---------------------------------------------------

    def apply_move(self, element: int, side: str, target: int) -> None:
        """Reassign one element and update tables and accumulators.

        Mass is subtracted from the old cluster's rows/columns of the
        touched tables and added to the new cluster's; only the entropy
        accumulators of those two clusters are refreshed. Moving an
        element to its current cluster is a no-op.
        """
        if side == ROW:
            self._apply_row_move(element, target)
        elif side == COL:
            self._apply_col_move(element, target)
        else:
            raise ValueError(f"side must be {ROW!r} or {COL!r}, got {side!r}")

    def _bump_move_counter(self):
        self.moves_applied += 1
        self._moves_since_rebuild += 1
        if self._moves_since_rebuild >= REBUILD_EVERY:
            self.rebuild()

    def _apply_row_move(self, i: int, b: int) -> None:
        if not 0 <= i < self.dist.n_rows:
            raise IndexOutOfRange(f"row index {i} outside [0, {self.dist.n_rows})")
        if not 0 <= b < self.n_row_clusters:
            raise IndexOutOfRange(f"row cluster {b} outside [0, {self.n_row_clusters})")
        a = int(self.phi[i])
        if b == a:
            return
        cols, vals, profile, w = self._row_context(i)

        self._t_rc_y[a, cols] -= vals
        self._t_rc_y[b, cols] += vals
        self._t_rc_cc[a] -= profile
        self._t_rc_cc[b] += profile
        self._p_rc[a] -= w
        self._p_rc[b] += w
        # Emptied clusters may retain tiny negative cancellation residue.
        np.maximum(self._t_rc_y[a], 0.0, out=self._t_rc_y[a])
        np.maximum(self._t_rc_cc[a], 0.0, out=self._t_rc_cc[a])
        self._p_rc[a] = max(self._p_rc[a], 0.0)

        for c in (a, b):
            old_y, old_cc = self._acc_rc_y[c], self._acc_rc_cc[c]
            self._acc_rc_y[c] = plog2(self._t_rc_y[c]).sum()
            self._acc_rc_cc[c] = plog2(self._t_rc_cc[c]).sum()
            self._h_rc_y += self._acc_rc_y[c] - old_y
            self._h_rc_cc += self._acc_rc_cc[c] - old_cc
        self._h_rc = float(plog2(self._p_rc).sum())
        self.phi[i] = b
        self._bump_move_counter()

    def _apply_col_move(self, k: int, b: int) -> None:
        if not 0 <= k < self.dist.n_cols:
            raise IndexOutOfRange(f"col index {k} outside [0, {self.dist.n_cols})")
        if not 0 <= b < self.n_col_clusters:
            raise IndexOutOfRange(f"col cluster {b} outside [0, {self.n_col_clusters})")
        a = int(self.psi[k])
        if b == a:
            return
        rows, vals, profile, w = self._col_context(k)

        # p(X, Yc): two columns change on this column's support rows.
        self._t_x_cc[rows, a] -= vals
        self._t_x_cc[rows, b] += vals
        self._t_x_cc[rows, a] = np.maximum(self._t_x_cc[rows, a], 0.0)
        for c in (a, b):
            old = self._acc_x_cc[c]
            self._acc_x_cc[c] = plog2(self._t_x_cc[:, c]).sum()
            self._h_x_cc += self._acc_x_cc[c] - old

        # p(Xc, Yc): two columns change across every row cluster, so the
        # per-row-cluster accumulators are adjusted by exact differences.
        before_cc = plog2(self._t_rc_cc[:, [a, b]]).sum(axis=1)
        self._t_rc_cc[:, a] -= profile
        self._t_rc_cc[:, b] += profile
        np.maximum(self._t_rc_cc[:, a], 0.0, out=self._t_rc_cc[:, a])
        self._acc_rc_cc += plog2(self._t_rc_cc[:, [a, b]]).sum(axis=1) - before_cc
        self._h_rc_cc = float(self._acc_rc_cc.sum())

        self._p_cc[a] -= w
        self._p_cc[b] += w
        self._p_cc[a] = max(self._p_cc[a], 0.0)
        self._h_cc = float(plog2(self._p_cc).sum())
        self.psi[k] = b
        self._bump_move_counter()

    # -- diagnostics ------------------------------------------------------

    def consistency_error(self) -> float:
        """Max elementwise difference between live tables and a fresh aggregate."""
        fresh = aggregate(self.dist, self.coclustering())
        return max(
            float(np.abs(self._t_rc_cc - fresh.p_rcluster_ccluster).max()),
            float(np.abs(self._t_x_cc - fresh.p_row_ccluster).max()),
            float(np.abs(self._t_rc_y - fresh.p_rcluster_col).max()),
            float(np.abs(self._p_rc - fresh.row_cluster_marginal).max()),
            float(np.abs(self._p_cc - fresh.col_cluster_marginal).max()),
        )
