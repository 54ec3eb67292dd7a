"""Multi-dataset, multi-k, multi-seed experiment batteries."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import numpy as np

from ..bigvns import BigVnsParams, big_vns_clust, kmeans_full
from ..kmeans import LloydParams
from .data import DatasetSpec, ExperimentSpec
from .metrics import RUN_COLUMNS, RUN_SCHEMA, RunRecord, relative_error, run_record_row

log = logging.getLogger(__name__)

FSTAR_SOURCE = "local-multistart-kmeans"
DEFAULT_TIME_LIMIT = 1.0


def derive_seed(base_seed: int, dataset: str, k: int, algorithm: str, replicate: int) -> int:
    key = f"{base_seed}|{dataset}|{k}|{algorithm}|{replicate}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def _lloyd_params(params: dict) -> LloydParams:
    return LloydParams(
        max_iters=int(params.get("lloyd_max_iters", 300)),
        rel_tol=float(params.get("rel_tol", 1e-4)),
        candidates=int(params.get("candidates", 3)),
    )


def run_algorithm(X: np.ndarray, k: int, algorithm: str, params: dict, seed: int) -> tuple[float, float]:
    """Run one algorithm once; returns ``(objective, wall seconds)``."""
    base = algorithm.split("@")[0]
    lloyd_params = _lloyd_params(params)
    if base == "kmeans":
        start = time.perf_counter()
        result = kmeans_full(X, k, lloyd_params, np.random.default_rng(seed))
        return result.objective, time.perf_counter() - start
    s = int(params.get("sample_size", min(X.shape[0], 1000)))
    max_iters = params.get("max_iters")
    bparams = BigVnsParams(
        k=k,
        s=s,
        p_max=min(int(params.get("p_max", 3)), k),
        T=float(params.get("time_limit", DEFAULT_TIME_LIMIT)),
        lloyd=lloyd_params,
        seed=seed,
        baseline_mode=base == "bigmeans",
        max_iters=None if max_iters is None else int(max_iters),
    )
    start = time.perf_counter()
    result = big_vns_clust(X, bparams)
    return result.objective, time.perf_counter() - start


def estimate_best_known(X: np.ndarray, k: int, n_starts: int, seed: int) -> float:
    """Best objective over ``n_starts`` K-means++ / Lloyd runs on the full data."""
    rng = np.random.default_rng(seed)
    params = LloydParams(rel_tol=0.0)
    return min(kmeans_full(X, k, params, rng).objective for _ in range(n_starts))


def _fstar_path(ds: DatasetSpec, spec: ExperimentSpec, out_dir: Path | None) -> Path | None:
    kind, _, target = ds.source.partition(":")
    if kind == "file":
        path = Path(target)
        if spec.base_dir is not None and not path.is_absolute():
            path = spec.base_dir / path
        return path.with_name(path.name + ".fstar.json")
    if out_dir is not None:
        return out_dir / f"{ds.name}.fstar.json"
    return None


def resolve_best_known(ds: DatasetSpec, X: np.ndarray, spec: ExperimentSpec, out_dir: Path | None) -> dict[int, float]:
    """Best-known objectives for every k: from the experiment file, a cached sidecar, or computed locally."""
    known = dict(ds.f_star)
    missing = [k for k in spec.k_values if k not in known]
    if not missing:
        return known
    path = _fstar_path(ds, spec, out_dir)
    cache = {}
    if path is not None and path.exists():
        stored = json.loads(path.read_text())
        if stored.get("seed") == ds.seed and stored.get("starts") == spec.fstar_starts:
            cache = {int(k): v for k, v in stored["f_star"].items()}
    for k in missing:
        if k not in cache:
            log.info("estimating best-known objective for %s, k=%d", ds.name, k)
            cache[k] = estimate_best_known(X, k, spec.fstar_starts, derive_seed(spec.base_seed, ds.name, k, "fstar", 0))
        known[k] = cache[k]
    if path is not None:
        try:
            path.write_text(
                json.dumps(
                    {"source": FSTAR_SOURCE, "dataset": ds.name, "seed": ds.seed,
                     "starts": spec.fstar_starts, "f_star": {str(k): v for k, v in sorted(cache.items())}},
                    indent=2,
                )
            )
        except OSError as exc:
            log.warning("could not store best-known objectives at %s: %s", path, exc)
    return known


def _task(X, dataset, k, algorithm, params, seed, f_star):
    try:
        f, t = run_algorithm(X, k, algorithm, params, seed)
    except Exception as exc:  # recorded, the battery keeps going
        return RunRecord(dataset, k, algorithm, seed, math.nan, None, math.nan, error=f"{type(exc).__name__}: {exc}")
    eps = relative_error(f, f_star) if f_star is not None else None
    return RunRecord(dataset, k, algorithm, seed, f, eps, t)


class _Collector:
    """Appends run records to CSV as they arrive; failures also go to failures.log."""

    def __init__(self, out_dir: Path | None):
        self.path = None if out_dir is None else out_dir / "runs.csv"
        if self.path is not None:
            with open(self.path, "w", newline="") as fh:
                fh.write(RUN_SCHEMA + f" fstar_source={FSTAR_SOURCE}\n")
                csv.writer(fh).writerow(RUN_COLUMNS)

    def add(self, record: RunRecord) -> None:
        if record.error:
            log.warning("run failed: %s k=%d %s seed=%d: %s",
                        record.dataset, record.k, record.algorithm, record.seed, record.error)
        if self.path is None:
            return
        with open(self.path, "a", newline="") as fh:
            csv.writer(fh).writerow(run_record_row(record))
        if record.error:
            with open(self.path.with_name("failures.log"), "a") as fh:
                fh.write(f"{record.dataset},{record.k},{record.algorithm},{record.seed}: {record.error}\n")


def run_battery(spec: ExperimentSpec, out_dir=None, jobs: int = 1) -> list[RunRecord]:
    """One record per (dataset, k, algorithm, replicate), returned in that order."""
    out_dir = None if out_dir is None else Path(out_dir)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    collector = _Collector(out_dir)
    tasks = []
    data = {}
    for ds in spec.datasets:
        X = ds.load(spec.base_dir)
        data[ds.name] = X
        f_star = resolve_best_known(ds, X, spec, out_dir)
        for k in spec.k_values:
            for algorithm in spec.algorithms:
                params = spec.algo_params(algorithm)
                for rep in range(spec.n_exec):
                    seed = derive_seed(spec.base_seed, ds.name, k, algorithm, rep)
                    tasks.append((ds.name, k, algorithm, params, seed, f_star.get(k)))

    results: list[RunRecord | None] = [None] * len(tasks)
    if jobs <= 1:
        for i, (name, *rest) in enumerate(tasks):
            results[i] = _task(data[name], name, *rest)
            collector.add(results[i])
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_task, data[name], name, *rest): i for i, (name, *rest) in enumerate(tasks)}
            for fut in as_completed(futures):
                i = futures[fut]
                results[i] = fut.result()
                collector.add(results[i])
    return results
