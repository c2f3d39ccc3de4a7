"""Sequential local search, annealing, and restart orchestration.

The sequential heuristic repeatedly sweeps all rows and then all columns,
reassigning each element to the cluster of least cost while everything
else stays fixed. Because the current assignment is always among the
candidates, the cost never increases and the search terminates. The
annealing wrapper runs the sweep at a decreasing coupling schedule,
warm-starting each stage from the previous result, which is what rescues
small-beta objectives from their many poor local optima.

A single optimization run is strictly sequential; restarts are
independent (one private evaluator each over the shared read-only
distribution) and reduce deterministically to the best final cost with
ties broken by lowest seed.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import CoClustering, JointDistribution
from .cost import COL, ROW, TIE_TOL, MoveEvaluator, _check_beta, cost_beta
from .errors import TooManyClusters

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 20
DEFAULT_ANNEAL_STEP = 0.1


@dataclass(frozen=True)
class OptimizerConfig:
    """Parameters of a co-clustering run.

    tol is the threshold on the absolute cost decrease per outer
    iteration (bits); anneal_step is the decrement of the coupling
    schedule; restarts derive seeds seed+0 .. seed+restarts-1.
    """

    beta: float
    n_row_clusters: int
    n_col_clusters: int
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL
    anneal_step: float = DEFAULT_ANNEAL_STEP
    restarts: int = 1
    seed: int = 0
    init: CoClustering | None = None

    def __post_init__(self):
        _check_beta(self.beta)
        if self.n_row_clusters < 1 or self.n_col_clusters < 1:
            raise TooManyClusters("cluster counts must be >= 1")
        if not 0.0 < self.anneal_step <= 1.0:
            raise ValueError(f"anneal_step = {self.anneal_step} outside (0, 1]")
        if self.tol < 0.0:
            raise ValueError(f"tol = {self.tol} must be >= 0")
        if self.max_iter < 1:
            raise ValueError(f"max_iter = {self.max_iter} must be >= 1")
        if self.restarts < 1:
            raise ValueError(f"restarts = {self.restarts} must be >= 1")

    def validate_against(self, dist: JointDistribution) -> None:
        if self.n_row_clusters > dist.n_rows:
            raise TooManyClusters(
                f"{self.n_row_clusters} row clusters for {dist.n_rows} rows"
            )
        if self.n_col_clusters > dist.n_cols:
            raise TooManyClusters(
                f"{self.n_col_clusters} col clusters for {dist.n_cols} cols"
            )
        if self.init is not None:
            self.init.matches(dist)


@dataclass
class StageRecord:
    """One annealing stage: the coupling value it ran at and its outcome."""

    alpha: float
    cost: float
    clustering: CoClustering
    iteration_costs: list[float] = field(default_factory=list)


@dataclass
class RunTrace:
    """Cost trajectory and bookkeeping of one optimization run."""

    stages: list[StageRecord] = field(default_factory=list)
    total_moves: int = 0
    wall_ms: float = 0.0

    @property
    def final_cost(self) -> float:
        return self.stages[-1].cost

    @property
    def iteration_costs(self) -> list[float]:
        """Per-outer-iteration costs of the last stage."""
        return self.stages[-1].iteration_costs


def random_clustering(seed, n_elements: int, n_clusters: int) -> np.ndarray:
    """Seeded random assignment in which every cluster id is used.

    The first n_clusters positions of a seeded shuffle receive the
    distinct ids 0..n_clusters-1; all remaining elements draw ids
    uniformly at random.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n_clusters > n_elements:
        raise TooManyClusters(f"{n_clusters} clusters for {n_elements} elements")
    out = np.empty(n_elements, dtype=np.int64)
    perm = rng.permutation(n_elements)
    out[perm[:n_clusters]] = np.arange(n_clusters)
    if n_elements > n_clusters:
        out[perm[n_clusters:]] = rng.integers(0, n_clusters, n_elements - n_clusters)
    return out


def _argmin_with_current(costs: np.ndarray, current: int) -> int:
    """Index of least cost; stay put on ties within TIE_TOL, else lowest id."""
    best = int(np.argmin(costs))
    if costs[current] <= costs[best] + TIE_TOL:
        return current
    return best


def _sweep(evaluator: MoveEvaluator, beta: float) -> int:
    """One full pass over all rows then all columns; returns moves applied."""
    moves = 0
    for i in range(evaluator.dist.n_rows):
        totals = evaluator.eval_row_moves(i, beta)
        target = _argmin_with_current(totals, int(evaluator.phi[i]))
        if target != evaluator.phi[i]:
            evaluator.apply_move(i, ROW, target)
            moves += 1
    for k in range(evaluator.dist.n_cols):
        totals = evaluator.eval_col_moves(k, beta)
        target = _argmin_with_current(totals, int(evaluator.psi[k]))
        if target != evaluator.psi[k]:
            evaluator.apply_move(k, COL, target)
            moves += 1
    return moves


def _run_stage(evaluator: MoveEvaluator, beta: float, max_iter: int, tol: float) -> StageRecord:
    """Sweeps at a fixed coupling until the per-iteration decrease hits tol."""
    iteration_costs: list[float] = []
    # The convergence gate needs a defined decrease before the first
    # iteration; the initial cost itself bounds how much a sweep could
    # still recover, so an already-cheap start converges immediately.
    delta = evaluator.current_total(beta)
    iteration = 0
    while iteration < max_iter and delta > tol:
        cost_before = evaluator.current_total(beta)
        _sweep(evaluator, beta)
        evaluator.rebuild()
        cost_after = evaluator.current_total(beta)
        delta = cost_before - cost_after
        iteration_costs.append(cost_after)
        iteration += 1
    return StageRecord(
        alpha=beta,
        cost=evaluator.current_total(beta),
        clustering=evaluator.coclustering(),
        iteration_costs=iteration_costs,
    )


def sequential_coclustering(
    dist: JointDistribution, config: OptimizerConfig
) -> tuple[CoClustering, RunTrace]:
    """Minimize the cost at a fixed coupling by single-element sweeps.

    Starts from config.init when given, otherwise from a seeded random
    clustering. Each outer iteration sweeps all rows choosing the
    argmin-cost cluster, then all columns; it stops when the cost
    decrease per iteration is at most tol or after max_iter iterations.
    """
    config.validate_against(dist)
    start = time.perf_counter()
    if config.init is not None:
        cc = config.init
    else:
        rng = np.random.default_rng(config.seed)
        cc = CoClustering(
            random_clustering(rng, dist.n_rows, config.n_row_clusters),
            random_clustering(rng, dist.n_cols, config.n_col_clusters),
            config.n_row_clusters,
            config.n_col_clusters,
        )
    evaluator = MoveEvaluator(dist, cc)
    stage = _run_stage(evaluator, config.beta, config.max_iter, config.tol)
    trace = RunTrace(
        stages=[stage],
        total_moves=evaluator.moves_applied,
        wall_ms=(time.perf_counter() - start) * 1e3,
    )
    # Final cost reported from a fresh evaluation, never a live cache.
    stage.cost = cost_beta(dist, stage.clustering, config.beta).total
    return stage.clustering, trace


def anneal_schedule(beta: float, step: float) -> list[float]:
    """Coupling values 1, 1-step, 1-2*step, ... clipped to end exactly at beta."""
    alphas = [1.0]
    m = 1
    while alphas[-1] > beta:
        # Exact decimal steps so the schedule cannot skip over beta.
        alphas.append(max(round(1.0 - m * step, 12), beta))
        m += 1
    return alphas


def annealed_coclustering(
    dist: JointDistribution, config: OptimizerConfig
) -> tuple[CoClustering, RunTrace]:
    """Sweep at couplings annealed from 1 down to config.beta.

    The first stage runs at coupling 1 (or is skipped into directly when
    beta = 1); every later stage warm-starts from the previous stage's
    clustering. Returns the final stage's clustering and the full trace.
    """
    config.validate_against(dist)
    start = time.perf_counter()
    if config.init is not None:
        cc = config.init
    else:
        rng = np.random.default_rng(config.seed)
        cc = CoClustering(
            random_clustering(rng, dist.n_rows, config.n_row_clusters),
            random_clustering(rng, dist.n_cols, config.n_col_clusters),
            config.n_row_clusters,
            config.n_col_clusters,
        )
    evaluator = MoveEvaluator(dist, cc)
    trace = RunTrace()
    for alpha in anneal_schedule(config.beta, config.anneal_step):
        stage = _run_stage(evaluator, alpha, config.max_iter, config.tol)
        trace.stages.append(stage)
    trace.total_moves = evaluator.moves_applied
    trace.wall_ms = (time.perf_counter() - start) * 1e3
    final = trace.stages[-1]
    final.cost = cost_beta(dist, final.clustering, config.beta).total
    return final.clustering, trace


def one_sided_clustering(
    dist: JointDistribution,
    side: str,
    k: int,
    restarts: int = 25,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, float]:
    """Cluster one side only, preserving information about the other.

    Sequentially minimizes the decoupled loss of that side (rows:
    information about columns lost by merging rows; cols: the mirror),
    keeping the best of `restarts` random starts by final loss. Returns
    (assignment, loss in bits).
    """
    if side not in (ROW, COL):
        raise ValueError(f"side must be {ROW!r} or {COL!r}, got {side!r}")
    n = dist.n_rows if side == ROW else dist.n_cols
    if k > n:
        raise TooManyClusters(f"{k} clusters for {n} elements")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    best_assign = None
    best_loss = np.inf
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        if side == ROW:
            cc = CoClustering(
                random_clustering(rng, n, k), np.arange(dist.n_cols), k, dist.n_cols
            )
        else:
            cc = CoClustering(
                np.arange(dist.n_rows), random_clustering(rng, n, k), dist.n_rows, k
            )
        evaluator = MoveEvaluator(dist, cc)
        # With the other side at identity, the coupling-1 cost reduces to
        # exactly the one-sided loss being minimized.
        delta = evaluator.current_total(1.0)
        iteration = 0
        while iteration < max_iter and delta > tol:
            before = evaluator.current_total(1.0)
            elements = range(dist.n_rows) if side == ROW else range(dist.n_cols)
            for e in elements:
                if side == ROW:
                    totals = evaluator.eval_row_moves(e, 1.0)
                    target = _argmin_with_current(totals, int(evaluator.phi[e]))
                    if target != evaluator.phi[e]:
                        evaluator.apply_move(e, ROW, target)
                else:
                    totals = evaluator.eval_col_moves(e, 1.0)
                    target = _argmin_with_current(totals, int(evaluator.psi[e]))
                    if target != evaluator.psi[e]:
                        evaluator.apply_move(e, COL, target)
            evaluator.rebuild()
            delta = before - evaluator.current_total(1.0)
            iteration += 1
        loss = evaluator.current_total(1.0)
        if loss < best_loss:
            best_loss = loss
            best_assign = (
                np.array(evaluator.phi) if side == ROW else np.array(evaluator.psi)
            )
    return best_assign, float(best_loss)


def _one_restart(dist, config, seed):
    run_config = replace(config, seed=seed, restarts=1)
    cc, trace = annealed_coclustering(dist, run_config)
    return seed, cc, trace


def best_of_restarts(
    dist: JointDistribution, config: OptimizerConfig, threads: int = 1
) -> tuple[CoClustering, RunTrace]:
    """Annealed runs at seeds seed+0..restarts-1; keep the least final cost.

    Ties go to the lowest seed, so the reduction is deterministic
    regardless of completion order; threads only affect wall time.
    """
    config.validate_against(dist)
    seeds = [config.seed + r for r in range(config.restarts)]
    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: _one_restart(dist, config, s), seeds))
    else:
        results = [_one_restart(dist, config, s) for s in seeds]
    results.sort(key=lambda r: r[0])
    best = None
    for seed, cc, trace in results:
        if best is None or trace.final_cost < best[2].final_cost:
            best = (seed, cc, trace)
    return best[1], best[2]
