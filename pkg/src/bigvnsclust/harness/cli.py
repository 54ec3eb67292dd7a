"""Command-line entry point: ``cluster``, ``gen``, ``bench`` and ``sweep-pmax``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..bigvns import BigVnsParams, big_vns_clust, kmeans_full
from ..errors import ClusteringError, IngestionError
from ..kmeans import LloydParams
from .battery import run_battery
from .data import (
    generate_gaussian_mixture,
    load_csv,
    load_experiment_spec,
    load_mixture,
    save_csv,
)
from .metrics import aggregate, emit_table, overall_rows

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUN = 0, 1, 2, 3

log = logging.getLogger("bigvnsclust")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bigvnsclust", description="Big data MSSC clustering with BigVNSClust.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="run one clustering")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="CSV file of numeric features")
    src.add_argument("--synthetic", help="builtin mixture name (x1) or mixture spec file")
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--algo", choices=["bigvns", "bigmeans", "kmeans"], default="bigvns")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--p-max", type=int, default=3)
    p.add_argument("--time-limit", type=float, default=10.0)
    p.add_argument("--max-iters", type=int, default=None, help="optional iteration cap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--data-seed", type=int, default=0, help="seed for --synthetic generation")
    p.add_argument("--out", type=Path, help="write centroids, labels and objective as JSON")

    p = sub.add_parser("gen", help="generate a Gaussian mixture dataset")
    p.add_argument("--spec", required=True, help="builtin mixture name (x1) or mixture spec file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)

    def bench_flags(p):
        p.add_argument("--spec", type=Path, required=True, help="experiment spec file")
        p.add_argument("--out-dir", type=Path, required=True)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("bench", help="run an experiment battery")
    bench_flags(p)

    p = sub.add_parser("sweep-pmax", help="compare BigVNSClust across maximum shaking powers")
    bench_flags(p)
    p.add_argument("--p-max-values", type=_int_list, default=[1, 2, 3, 4, 5])
    return parser


def _load_cluster_data(args) -> np.ndarray:
    if args.data is not None:
        return load_csv(args.data, skip_header=args.skip_header)
    return generate_gaussian_mixture(load_mixture(args.synthetic), args.data_seed)


def cmd_cluster(args) -> int:
    X = _load_cluster_data(args)
    lloyd_params = LloydParams()
    if args.algo == "kmeans":
        result = kmeans_full(X, args.k, lloyd_params, np.random.default_rng(args.seed))
    else:
        s = args.sample_size if args.sample_size is not None else min(X.shape[0], 1000)
        try:
            params = BigVnsParams(
                k=args.k, s=s, p_max=min(args.p_max, args.k), T=args.time_limit, lloyd=lloyd_params,
                seed=args.seed, baseline_mode=args.algo == "bigmeans", max_iters=args.max_iters,
            )
        except ValueError as exc:
            raise UsageError(str(exc))
        result = big_vns_clust(X, params)
    print(f"algorithm={args.algo} k={args.k} objective={result.objective!r} "
          f"iterations={result.iterations} elapsed={result.elapsed:.3f}s")
    if args.out is not None:
        args.out.write_text(json.dumps({
            "algorithm": args.algo,
            "k": args.k,
            "seed": args.seed,
            "objective": result.objective,
            "iterations": result.iterations,
            "elapsed": result.elapsed,
            "centroids": result.centroids.centers.tolist(),
            "labels": result.labels.tolist(),
        }))
    return EXIT_OK


def cmd_gen(args) -> int:
    X = generate_gaussian_mixture(load_mixture(args.spec), args.seed)
    save_csv(args.out, X)
    print(f"wrote {X.shape[0]} x {X.shape[1]} points to {args.out}")
    return EXIT_OK


def _finish_bench(records, spec, out_dir: Path, extra_overall: bool = False) -> int:
    rows = aggregate(records, spec.k_values)
    if extra_overall:
        rows = rows + overall_rows(rows)
    (out_dir / "aggregate.csv").write_text(emit_table(rows, "csv"))
    print(emit_table(rows, "text"), end="")
    failed = sum(r.error is not None for r in records)
    if failed:
        print(f"{failed} of {len(records)} runs failed; see {out_dir / 'failures.log'}", file=sys.stderr)
        return EXIT_RUN
    return EXIT_OK


def cmd_bench(args) -> int:
    spec = load_experiment_spec(args.spec)
    records = run_battery(spec, args.out_dir, jobs=args.jobs)
    return _finish_bench(records, spec, args.out_dir)


def cmd_sweep_pmax(args) -> int:
    spec = load_experiment_spec(args.spec)
    base = spec.algo_params("bigvns")
    params = dict(spec.params)
    algorithms = []
    for value in args.p_max_values:
        label = f"bigvns@p{value}"
        params[label] = {**base, "p_max": float(value)}
        algorithms.append(label)
    spec = replace(spec, algorithms=algorithms, params=params)
    records = run_battery(spec, args.out_dir, jobs=args.jobs)
    return _finish_bench(records, spec, args.out_dir, extra_overall=True)


COMMANDS = {"cluster": cmd_cluster, "gen": cmd_gen, "bench": cmd_bench, "sweep-pmax": cmd_sweep_pmax}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestionError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ClusteringError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
