"""Command-line driver for co-clustering runs, sweeps, and checks.

Subcommands: cocluster (one annealed run with restarts), sweep (a grid
of coupling values x seeds written to a flat CSV), synth (generate the
synthetic dataset families), fixtures (dump bundled example matrices),
eval (score saved assignments), and markov-check (the chain-vs-table
consistency harness).

Exit codes: 0 success, 1 input/load failure, 2 invalid flags or
configuration, 3 reducible input without --smooth. Standard output is
machine-parsable key=value lines. Every subcommand is deterministic
given --seed; --threads only changes wall time.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import io as cio
from .core import CoClustering, connected_components, normalize
from .cost import cost_beta
from .errors import (
    BetaOutOfRange,
    CoclusterError,
    Reducible,
    TooManyClusters,
)
from .markov import consistency_residual
from .metrics import map_prime, map_score
from .optimize import (
    OptimizerConfig,
    annealed_coclustering,
    best_of_restarts,
    one_sided_clustering,
    random_clustering,
)
from .synth import CirculantSpec, PlantedSpec, fixture, fixtures, gen_circulant, gen_planted, smooth

EXIT_OK = 0
EXIT_LOAD = 1
EXIT_CONFIG = 2
EXIT_REDUCIBLE = 3

RESIDUAL_LIMIT = 1e-9


def _emit(key, value):
    if isinstance(value, float):
        print(f"{key}={value:.12g}")
    else:
        print(f"{key}={value}")


def _load_matrix(args) -> tuple[np.ndarray, str]:
    """Resolve --input/--format into (raw matrix, dataset id)."""
    if args.format == "fixture":
        fx = fixture(args.input)
        return np.asarray(fx.matrix, dtype=float), f"fixture:{fx.name}"
    path = Path(args.input)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    if args.format == "csv":
        return cio.load_dense_csv(path, delimiter=args.delimiter), str(path)
    if args.format == "triplets":
        return cio.load_triplets(path), str(path)
    if args.format == "mm":
        return cio.load_matrix_market(path), str(path)
    raise ValueError(f"unknown format {args.format!r}")


def _load_labels(path) -> np.ndarray:
    labels = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                labels.append(int(stripped))
    return np.asarray(labels, dtype=np.int64)


def _load_multilabels(path) -> list[set]:
    out = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                out.append({int(tok) for tok in stripped.split(",")})
    return out


def _write_labels(labels, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for lab in labels:
            handle.write(f"{int(lab)}\n")


def _parse_betas(spec: str) -> list[float]:
    """Comma list ("0,0.5,1") or range ("0:1:0.1") of coupling values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"beta range must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("beta range step must be positive")
        count = int(round((stop - start) / step))
        values = [round(start + i * step, 12) for i in range(count + 1)]
    else:
        values = [float(tok) for tok in spec.split(",") if tok.strip() != ""]
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise BetaOutOfRange(f"beta {v} outside [0, 1]")
    return values


def _dataset_args(parser):
    parser.add_argument("--input", required=True, help="matrix file, or fixture name with --format fixture")
    parser.add_argument(
        "--format", default="csv", choices=["csv", "triplets", "mm", "fixture"]
    )
    parser.add_argument("--delimiter", default=",")


def _run_args(parser):
    parser.add_argument("--beta", type=float, required=True)
    parser.add_argument("--row-clusters", type=int, required=True)
    parser.add_argument("--col-clusters", type=int, required=True)
    parser.add_argument("--restarts", type=int, default=1)
    parser.add_argument("--max-iter", type=int, default=20)
    parser.add_argument("--tol", type=float, default=1e-3)
    parser.add_argument("--anneal-step", type=float, default=0.1)
    parser.add_argument("--init", default="random", choices=["random", "sib"])
    parser.add_argument("--init-restarts", type=int, default=25)


def _common_args(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--output-dir", default=".")
    parser.add_argument("--plot", action="store_true", help="render figures next to the output")


def _sib_init(dist, args) -> CoClustering:
    phi, _ = one_sided_clustering(
        dist, "row", args.row_clusters, restarts=args.init_restarts, seed=args.seed
    )
    psi, _ = one_sided_clustering(
        dist,
        "col",
        args.col_clusters,
        restarts=args.init_restarts,
        seed=args.seed + args.init_restarts,
    )
    return CoClustering(phi, psi, args.row_clusters, args.col_clusters)


def _make_record(args, dataset_id, raw, dist, cc, trace, truth_rows=None, truth_cols=None):
    breakdown = cost_beta(dist, cc, args.beta)
    config = {
        "beta": args.beta,
        "n_row_clusters": args.row_clusters,
        "n_col_clusters": args.col_clusters,
        "max_iter": args.max_iter,
        "tol": args.tol,
        "anneal_step": args.anneal_step,
        "restarts": args.restarts,
        "seed": args.seed,
        "init": args.init,
    }
    record = cio.RunRecord(
        dataset_id=dataset_id,
        content_hash=cio.content_hash(raw),
        config=config,
        beta=args.beta,
        seed=args.seed,
        final_cost_bits=breakdown.total,
        cost_breakdown=asdict(breakdown),
        phi=cc.phi.tolist(),
        psi=cc.psi.tolist(),
        n_nonempty_row_clusters=cc.n_nonempty_row_clusters,
        n_nonempty_col_clusters=cc.n_nonempty_col_clusters,
        n_stages=len(trace.stages),
        total_moves=trace.total_moves,
        wall_ms=trace.wall_ms,
    )
    if truth_rows is not None:
        record.map_row = map_score(cc.phi, truth_rows, n_clusters=cc.n_row_clusters)
    if truth_cols is not None:
        record.map_col = map_score(cc.psi, truth_cols, n_clusters=cc.n_col_clusters)
    return record


def cmd_cocluster(args) -> int:
    raw, dataset_id = _load_matrix(args)
    dist = normalize(raw)
    truth_rows = _load_labels(args.truth_rows) if args.truth_rows else None
    truth_cols = _load_labels(args.truth_cols) if args.truth_cols else None

    init = _sib_init(dist, args) if args.init == "sib" else None
    config = OptimizerConfig(
        beta=args.beta,
        n_row_clusters=args.row_clusters,
        n_col_clusters=args.col_clusters,
        max_iter=args.max_iter,
        tol=args.tol,
        anneal_step=args.anneal_step,
        restarts=args.restarts,
        seed=args.seed,
        init=init,
    )
    cc, trace = best_of_restarts(dist, config, threads=args.threads)
    record = _make_record(args, dataset_id, raw, dist, cc, trace, truth_rows, truth_cols)

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_path = cio.write_run(record, out_dir / f"run_b{args.beta:g}_s{args.seed}.json")

    _emit("dataset", dataset_id)
    _emit("beta", args.beta)
    _emit("final_cost_bits", record.final_cost_bits)
    _emit("n_nonempty_row_clusters", record.n_nonempty_row_clusters)
    _emit("n_nonempty_col_clusters", record.n_nonempty_col_clusters)
    if record.map_row is not None:
        _emit("map_row", record.map_row)
    if record.map_col is not None:
        _emit("map_col", record.map_col)
    _emit("run_file", run_path)
    if args.plot:
        from .plotting import save_matrix_figure

        fig_path = save_matrix_figure(raw, out_dir / "input_matrix.png", title=dataset_id)
        _emit("figure", fig_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    raw, dataset_id = _load_matrix(args)
    dist = normalize(raw)
    truth_rows = _load_labels(args.truth_rows) if args.truth_rows else None
    truth_cols = _load_labels(args.truth_cols) if args.truth_cols else None
    betas = _parse_betas(args.betas)
    seeds = [args.seed + i for i in range(args.seeds)]

    def one(job):
        beta, seed = job
        config = OptimizerConfig(
            beta=beta,
            n_row_clusters=args.row_clusters,
            n_col_clusters=args.col_clusters,
            max_iter=args.max_iter,
            tol=args.tol,
            anneal_step=args.anneal_step,
            seed=seed,
        )
        cc, trace = annealed_coclustering(dist, config)
        breakdown = cost_beta(dist, cc, beta)
        rec = cio.RunRecord(
            dataset_id=dataset_id,
            content_hash="",
            config={},
            beta=beta,
            seed=seed,
            final_cost_bits=breakdown.total,
            cost_breakdown={},
            phi=[],
            psi=[],
            n_nonempty_row_clusters=cc.n_nonempty_row_clusters,
            n_nonempty_col_clusters=cc.n_nonempty_col_clusters,
            total_moves=trace.total_moves,
            wall_ms=trace.wall_ms,
        )
        if truth_rows is not None:
            rec.map_row = map_score(cc.phi, truth_rows, n_clusters=cc.n_row_clusters)
        if truth_cols is not None:
            rec.map_col = map_score(cc.psi, truth_cols, n_clusters=cc.n_col_clusters)
        return rec

    jobs = [(beta, seed) for beta in betas for seed in seeds]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(job) for job in jobs]

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sweep_path = cio.write_sweep(records, out_dir / "sweep.csv")
    _emit("dataset", dataset_id)
    _emit("rows_written", len(records))
    _emit("sweep_file", sweep_path)
    if args.plot:
        from .plotting import save_sweep_figure

        fig_path = save_sweep_figure(sweep_path, out_dir / "sweep.png")
        _emit("figure", fig_path)
    return EXIT_OK


def cmd_synth(args) -> int:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "planted":
        spec = PlantedSpec(
            n_rows=args.rows,
            n_cols=args.cols,
            row_clusters=args.row_clusters,
            col_clusters=args.col_clusters,
            noise_eps=args.eps,
            seed=args.seed,
        )
        dist, truth_rows, truth_cols = gen_planted(spec)
        stem = f"planted_{args.rows}x{args.cols}_e{args.eps:g}_s{args.seed}"
    else:
        dist, truth_rows, truth_cols = gen_circulant(
            CirculantSpec(k=args.k), smooth_eps=args.smooth_eps
        )
        stem = f"circulant_k{args.k}"
    matrix_path = out_dir / f"{stem}.csv"
    cio.write_dense_csv(dist.dense(), matrix_path)
    _write_labels(truth_rows, out_dir / f"{stem}.rows.labels")
    _write_labels(truth_cols, out_dir / f"{stem}.cols.labels")
    _emit("matrix_file", matrix_path)
    _emit("truth_rows_file", out_dir / f"{stem}.rows.labels")
    _emit("truth_cols_file", out_dir / f"{stem}.cols.labels")
    if args.plot:
        from .plotting import save_matrix_figure

        fig_path = save_matrix_figure(dist.dense(), out_dir / f"{stem}.png", title=stem)
        _emit("figure", fig_path)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    table = fixtures()
    names = [args.name] if args.name else sorted(table)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        if name not in table:
            raise KeyError(f"unknown fixture {name!r}; available: {sorted(table)}")
        fx = table[name]
        matrix_path = out_dir / f"{name}.csv"
        cio.write_dense_csv(fx.matrix, matrix_path)
        _emit(f"{name}.matrix_file", matrix_path)
        for cname, cc in fx.clusterings.items():
            rows_path = out_dir / f"{name}.{cname}.rows.labels"
            cols_path = out_dir / f"{name}.{cname}.cols.labels"
            _write_labels(cc.phi, rows_path)
            _write_labels(cc.psi, cols_path)
            _emit(f"{name}.{cname}.rows_file", rows_path)
            _emit(f"{name}.{cname}.cols_file", cols_path)
        if args.plot:
            from .plotting import save_cost_curves

            fig_path = save_cost_curves(
                fx.distribution(), fx.clusterings, out_dir / f"{name}_costs.png"
            )
            _emit(f"{name}.figure", fig_path)
    return EXIT_OK


def cmd_eval(args) -> int:
    pred = _load_labels(args.pred)
    if args.multi:
        truth = _load_multilabels(args.truth)
        _emit("map_prime", map_prime(pred, truth))
    else:
        truth = _load_labels(args.truth)
        _emit("map", map_score(pred, truth))
    return EXIT_OK


def cmd_markov_check(args) -> int:
    raw, dataset_id = _load_matrix(args)
    n_comp, _ = connected_components(raw)
    if n_comp == 1:
        dist = normalize(raw)
    elif args.smooth:
        dist = normalize(smooth(raw))
    else:
        raise Reducible(n_comp)
    betas = _parse_betas(args.betas)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        kr = int(rng.integers(1, min(dist.n_rows, 6) + 1))
        kc = int(rng.integers(1, min(dist.n_cols, 6) + 1))
        cc = CoClustering(
            random_clustering(rng, dist.n_rows, kr),
            random_clustering(rng, dist.n_cols, kc),
            kr,
            kc,
        )
        for beta in betas:
            worst = max(worst, consistency_residual(dist, cc, beta))
    _emit("dataset", dataset_id)
    _emit("samples", args.samples)
    _emit("max_residual", worst)
    _emit("residual_limit", RESIDUAL_LIMIT)
    passed = worst <= RESIDUAL_LIMIT
    _emit("consistent", str(passed).lower())
    return EXIT_OK if passed else EXIT_LOAD


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocluster",
        description="Information-theoretic co-clustering of nonnegative matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cocluster", help="one annealed co-clustering run (with restarts)")
    _dataset_args(p)
    _run_args(p)
    _common_args(p)
    p.add_argument("--truth-rows", help="row ground-truth labels, one per line")
    p.add_argument("--truth-cols", help="col ground-truth labels, one per line")
    p.set_defaults(func=cmd_cocluster)

    p = sub.add_parser("sweep", help="grid of coupling values x seeds, flat CSV out")
    _dataset_args(p)
    p.add_argument("--betas", default="0:1:0.1", help="comma list or start:stop:step")
    p.add_argument("--seeds", type=int, default=1, help="number of seeds (seed, seed+1, ...)")
    p.add_argument("--row-clusters", type=int, required=True)
    p.add_argument("--col-clusters", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--anneal-step", type=float, default=0.1)
    p.add_argument("--truth-rows")
    p.add_argument("--truth-cols")
    _common_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("--kind", required=True, choices=["planted", "circulant"])
    p.add_argument("--rows", type=int, default=80)
    p.add_argument("--cols", type=int, default=50)
    p.add_argument("--row-clusters", type=int, default=5)
    p.add_argument("--col-clusters", type=int, default=3)
    p.add_argument("--eps", type=float, default=0.0, help="noise mixture weight")
    p.add_argument("--k", type=int, default=15, help="circulant coupling width")
    p.add_argument("--smooth-eps", type=float, default=0.0)
    _common_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fixtures", help="dump bundled example matrices and clusterings")
    p.add_argument("--name", help="dump one fixture (default: all)")
    _common_args(p)
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("eval", help="score saved assignments against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--multi", action="store_true", help="truth has comma-separated label sets")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("markov-check", help="chain-vs-table cost consistency harness")
    _dataset_args(p)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--betas", default="0,0.25,0.5,0.75,1")
    p.add_argument("--smooth", action="store_true", help="blend in uniform mass if reducible")
    _common_args(p)
    p.set_defaults(func=cmd_markov_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Reducible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REDUCIBLE
    except (BetaOutOfRange, TooManyClusters, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CoclusterError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD


if __name__ == "__main__":
    sys.exit(main())
