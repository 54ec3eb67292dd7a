"""Relative error, per-cell statistics, #Succ counting and table rendering."""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass

from ..errors import AggregationError

RUN_COLUMNS = ["dataset", "k", "algorithm", "seed", "objective", "epsilon", "time_s"]
AGGREGATE_COLUMNS = [
    "dataset", "algorithm", "succ", "total",
    "eps_min", "eps_median", "eps_max", "t_min", "t_median", "t_max",
]
RUN_SCHEMA = "# schema: runrecord/1"
AGGREGATE_SCHEMA = "# schema: aggregate/1"
_STATS = AGGREGATE_COLUMNS[4:]


def relative_error(f: float, f_star: float) -> float:
    """Percentage excess of ``f`` over the best-known objective ``f_star`` (may be negative)."""
    if not f_star > 0:
        raise ValueError(f"best-known objective must be positive, got {f_star}")
    return 100.0 * (f - f_star) / f_star


@dataclass
class RunRecord:
    dataset: str
    k: int
    algorithm: str
    seed: int
    objective: float
    epsilon: float | None
    time_s: float
    error: str | None = None


@dataclass
class AggregateRow:
    dataset: str
    algorithm: str
    succ: int
    total: int
    eps_min: float
    eps_median: float
    eps_max: float
    t_min: float
    t_median: float
    t_max: float


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _eps(r: RunRecord) -> float:
    return math.nan if r.epsilon is None else r.epsilon


def _cells(records):
    cells = defaultdict(list)
    for r in records:
        if r.error is None:
            cells[(r.dataset, r.algorithm, r.k)].append(r)
    return cells


def _check_coverage(cells, records, k_values):
    missing = [
        (d, a, k)
        for d in sorted({r.dataset for r in records})
        for a in sorted({r.algorithm for r in records})
        for k in k_values
        if not cells.get((d, a, k))
    ]
    if missing:
        listed = ", ".join(f"({d}, k={k}, {a})" for d, a, k in missing)
        raise AggregationError(f"no successful runs for cells: {listed}")


def count_succ(records, dataset: str, algorithm: str, k_values) -> tuple[int, int]:
    """Number of ``k`` at which ``algorithm``'s median error is no worse than every competitor's."""
    cells = _cells(r for r in records if r.dataset == dataset)
    algorithms = sorted({a for (_, a, _) in cells})
    succ = 0
    for k in k_values:
        medians = {
            a: statistics.median(_eps(r) for r in cells[(dataset, a, k)])
            for a in algorithms
            if cells.get((dataset, a, k))
        }
        mine = medians.get(algorithm)
        if mine is not None and mine <= min(medians.values()):
            succ += 1
    return succ, len(k_values)


def aggregate(records, k_values) -> list[AggregateRow]:
    """Per (dataset, algorithm): min/median/max over replicates for each k, then averaged over k."""
    records = list(records)
    k_values = list(k_values)
    cells = _cells(records)
    _check_coverage(cells, records, k_values)
    rows = []
    for dataset in sorted({r.dataset for r in records}):
        for algorithm in sorted({r.algorithm for r in records}):
            per_k = []
            for k in k_values:
                runs = cells[(dataset, algorithm, k)]
                eps = [_eps(r) for r in runs]
                ts = [r.time_s for r in runs]
                per_k.append((min(eps), statistics.median(eps), max(eps), min(ts), statistics.median(ts), max(ts)))
            means = [statistics.fmean(col) for col in zip(*per_k)]
            succ, total = count_succ(records, dataset, algorithm, k_values)
            rows.append(AggregateRow(dataset, algorithm, succ, total, *means))
    return rows


def overall_rows(rows: list[AggregateRow], label: str = "Overall") -> list[AggregateRow]:
    """One summary row per algorithm: #Succ summed, statistics averaged over datasets."""
    by_algo = defaultdict(list)
    for row in rows:
        by_algo[row.algorithm].append(row)
    out = []
    for algorithm, group in by_algo.items():
        stats = [statistics.fmean(getattr(r, name) for r in group) for name in _STATS]
        out.append(
            AggregateRow(label, algorithm, sum(r.succ for r in group), sum(r.total for r in group), *stats)
        )
    return out


def _best_markers(rows: list[AggregateRow]) -> list[list[str]]:
    best = defaultdict(dict)
    for row in rows:
        for name in _STATS:
            value = getattr(row, name)
            if not math.isnan(value):
                cur = best[row.dataset].get(name)
                best[row.dataset][name] = value if cur is None else min(cur, value)
    return [
        [name for name in _STATS if getattr(row, name) == best[row.dataset].get(name)]
        for row in rows
    ]


def emit_table(rows: list[AggregateRow], fmt: str = "csv") -> str:
    """Render aggregate rows as CSV (with a ``best`` marker column) or aligned text.

    In text form the best value per dataset and metric is suffixed with ``*``.
    """
    if not rows:
        raise ValueError("nothing to render")
    markers = _best_markers(rows)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(AGGREGATE_SCHEMA + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS + ["best"])
        for row, best in zip(rows, markers):
            writer.writerow([_fmt(getattr(row, c)) for c in AGGREGATE_COLUMNS] + [";".join(best)])
        return buf.getvalue()
    if fmt == "text":
        header = ["dataset", "algorithm", "#Succ", *_STATS]
        body = []
        for row, best in zip(rows, markers):
            cells = [row.dataset, row.algorithm, f"{row.succ}/{row.total}"]
            cells += [f"{getattr(row, name):.2f}" + ("*" if name in best else "") for name in _STATS]
            body.append(cells)
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + body]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def parse_aggregate_csv(text: str) -> list[AggregateRow]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.DictReader(lines)
    rows = []
    for rec in reader:
        values = {"dataset": rec["dataset"], "algorithm": rec["algorithm"]}
        values["succ"], values["total"] = int(rec["succ"]), int(rec["total"])
        values.update({name: float(rec[name]) for name in _STATS})
        rows.append(AggregateRow(**values))
    return rows


def run_record_row(r: RunRecord) -> list[str]:
    return [_fmt(getattr(r, c)) for c in RUN_COLUMNS]


def read_run_records(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        failed = rec["objective"] == ""
        out.append(
            RunRecord(
                dataset=rec["dataset"],
                k=int(rec["k"]),
                algorithm=rec["algorithm"],
                seed=int(rec["seed"]),
                objective=math.nan if failed else float(rec["objective"]),
                epsilon=float(rec["epsilon"]) if rec["epsilon"] else None,
                time_s=math.nan if rec["time_s"] == "" else float(rec["time_s"]),
                error="failed" if failed else None,
            )
        )
    return out
