"""End-to-end acceptance checks; each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` (or just execute this file).
"""

import math
import statistics
import sys
import time

import numpy as np
import pytest

import oracles
from bigvnsclust import BigVnsParams, big_vns_clust, kmeans_full
from bigvnsclust.bigvns import shake_centroids
from bigvnsclust.core import CentroidSet, assign_points, objective, update_centroids
from bigvnsclust.harness.battery import run_battery
from bigvnsclust.harness.data import (
    X1_ADVERSARIAL_INIT,
    X1_SPEC,
    DatasetSpec,
    ExperimentSpec,
    format_mixture_spec,
    generate_gaussian_mixture,
    random_mixture_spec,
)
from bigvnsclust.harness.metrics import RunRecord, aggregate, count_succ, emit_table, relative_error
from bigvnsclust.kmeans import LloydParams, lloyd
from bigvnsclust.vns import b_vnd, basic_vns, best_improvement_local_search
from toy_problems import GRID, grid_moves, rugged, rugged_global_optimum, rugged_problem

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(criterion, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
        assert passed, detail

    return emit


def x1_reference_seed(candidates=range(200), target=171.5):
    """Dataset seed whose ground-truth objective is closest to the reference value."""
    truth = CentroidSet.from_points(X1_SPEC.means)
    return min(candidates, key=lambda s: abs(objective(generate_gaussian_mixture(X1_SPEC, s), truth) - target))


def test_1a_adversarial_init_is_trapped(report):
    init = CentroidSet.from_points(X1_ADVERSARIAL_INIT)
    values = [kmeans_full(generate_gaussian_mixture(X1_SPEC, seed), 3, init=init).objective for seed in range(20)]
    hits = sum(185 <= f <= 200 for f in values)
    report("1a", hits >= 18, f"{hits}/20 regenerations end in [185, 200] (median {statistics.median(values):.2f})")


def test_1b_escape_from_local_minimum(report):
    seed = x1_reference_seed()
    X = generate_gaussian_mixture(X1_SPEC, seed)
    truth = objective(X, CentroidSet.from_points(X1_SPEC.means))
    start = time.perf_counter()
    values = [big_vns_clust(X, BigVnsParams(k=3, s=70, p_max=3, T=1.5, seed=run)).objective for run in range(20)]
    hits = sum(f <= 177 for f in values)
    report(
        "1b",
        hits >= 18,
        f"{hits}/20 runs reach <= 177 (dataset seed {seed}, ground truth {truth:.2f}, "
        f"median {statistics.median(values):.2f}, best {min(values):.2f}, {time.perf_counter() - start:.0f}s)",
    )


def test_2_monotonicity(report):
    rng = np.random.default_rng(2)
    violations = 0
    for i in range(200):
        m, n, k = int(rng.integers(30, 400)), int(rng.integers(1, 6)), int(rng.integers(1, 9))
        X = rng.normal(size=(m, n)) * rng.uniform(0.5, 3.0, size=n)
        init = CentroidSet.from_points(X[rng.choice(m, k, replace=False)] + rng.normal(scale=0.1, size=(k, n)))
        hist = lloyd(X, init, LloydParams()).history
        violations += any(b > a for a, b in zip(hist, hist[1:]))
        s = int(rng.integers(max(k, 10), m + 1))
        res = big_vns_clust(X, BigVnsParams(k=k, s=s, p_max=int(rng.integers(1, k + 1)), T=60.0,
                                            seed=i, max_iters=25, baseline_mode=bool(i % 4 == 0)))
        acc = res.accepted_objectives
        violations += any(b >= a for a, b in zip(acc, acc[1:]))
        for rec in res.trace:
            violations += any(b > a for a, b in zip(rec.lloyd_history, rec.lloyd_history[1:]))
    report("2", violations == 0, f"{violations} monotonicity violations over 200 instances")


def test_3_oracle_equivalence(report):
    rng = np.random.default_rng(3)
    mismatches = 0
    for _ in range(100):
        m, n, k = int(rng.integers(1, 101)), int(rng.integers(1, 5)), int(rng.integers(1, 6))
        X = rng.normal(size=(m, n))
        C = CentroidSet.from_points(rng.normal(size=(k, n)))
        points, slots = X.tolist(), oracles.to_slots(C)
        labels, f = assign_points(X, C)
        ref_labels, ref_f = oracles.assign(points, slots)
        mismatches += labels.tolist() != ref_labels or f != ref_f
        mismatches += oracles.to_slots(update_centroids(X, labels, k)) != oracles.update(points, ref_labels, k)
        out = lloyd(X, C, LloydParams())
        ref_c, ref_fl, ref_it, ref_hist = oracles.lloyd(points, slots)
        mismatches += (oracles.to_slots(out.centroids), out.objective, out.iterations, out.history) != (
            ref_c, ref_fl, ref_it, ref_hist)
    report("3", mismatches == 0, f"{mismatches} mismatches against the naive reference over 100 instances")


def test_4_vns_kernel(report):
    best, best_value = rugged_global_optimum()
    prob = rugged_problem()
    ls = lambda x: best_improvement_local_search(x, prob.improve_neighborhoods[0], prob.f)
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        start = (int(rng.integers(GRID)), int(rng.integers(GRID)))
        st = basic_vns(start, prob.k_max, 5.0, prob.shake_neighborhoods, ls, prob.f, rng, max_iterations=400)
        hits += st.incumbent == best
    hoods = [grid_moves(1), grid_moves(2), grid_moves(4)]
    not_local = 0
    for start in [(x, y) for x in range(0, GRID, 9) for y in range(0, GRID, 9)]:
        x = b_vnd(start, hoods, rugged)
        not_local += any(rugged(y) < rugged(x) for N in hoods for y in N(x))
    report("4", hits >= 95 and not_local == 0,
           f"global optimum {best} (f={best_value:.3f}) found in {hits}/100 runs; "
           f"{not_local} non-local B-VND outputs over 144 starts")


def test_5_complexity_scaling(report):
    X = np.random.default_rng(5).uniform(size=(100_000, 10))
    lp = LloydParams(max_iters=10, rel_tol=0.0)

    def per_iteration(s, seed):
        res = big_vns_clust(X, BigVnsParams(k=10, s=s, p_max=3, T=600.0, lloyd=lp, seed=seed, max_iters=6))
        steps = {len(r.lloyd_history) for r in res.trace}
        return (res.trace[-1].elapsed - res.trace[0].elapsed) / (len(res.trace) - 1), steps

    per_iteration(1000, 0)  # warm up compiled kernels
    ratios, steps = [], set()
    for rep in range(5):
        small, st_a = per_iteration(20_000, rep)
        large, st_b = per_iteration(40_000, rep)
        ratios.append(large / small)
        steps |= st_a | st_b
    ok = all(1.5 <= r <= 2.6 for r in ratios) and len(steps) == 1
    report("5", ok, "time ratio s=40000 vs s=20000: " + ", ".join(f"{r:.2f}" for r in ratios)
           + f" (Lloyd steps per iteration {sorted(steps)})")


def test_6_schedule_and_shaking_invariants(report):
    rng = np.random.default_rng(6)
    violations, checked, with_degenerate = 0, 0, 0
    for i in range(60):
        k = int(rng.integers(2, 9))
        centers = rng.uniform(0, 10, size=(k, 2))
        X = np.vstack([rng.normal(c, 0.3, size=(40, 2)) for c in centers])
        p_max = int(rng.integers(1, k + 1))
        baseline = i % 3 == 0
        res = big_vns_clust(X, BigVnsParams(k=k, s=max(k, 3 * k), p_max=p_max, T=60.0, seed=i,
                                            max_iters=40, baseline_mode=baseline))
        expected_p = [0] * len(res.trace) if baseline else [t % p_max + 1 for t in range(len(res.trace))]
        violations += [r.p for r in res.trace] != expected_p
        for r in res.trace:
            checked += 1
            with_degenerate += r.prior_degenerate > 0
            violations += len(r.reinitialized) != min(k, r.p + r.prior_degenerate)
            violations += len(set(r.reinitialized)) != len(r.reinitialized)
    for i in range(300):
        k = int(rng.integers(1, 7))
        dead = [j for j in range(k) if rng.random() < 0.4]
        C = CentroidSet.from_points(rng.normal(size=(k, 2)) + 20).replace({j: None for j in dead})
        out, reinit = shake_centroids(C, 0, rng.normal(size=(30, 2)), LloydParams(), rng)
        live = [j for j in range(k) if j not in dead]
        violations += sorted(reinit) != dead
        violations += not np.array_equal(out.centers[live], C.centers[live])
        violations += out.n_degenerate != 0
    report("6", violations == 0,
           f"{violations} violations over {checked} traced iterations ({with_degenerate} with degenerate slots) "
           "and 300 baseline shakes")


def test_7_metric_arithmetic(report):
    problems = []
    if (relative_error(100.0, 100.0), relative_error(102.0, 100.0), relative_error(99.0, 100.0)) != (0.0, 2.0, -1.0):
        problems.append("relative_error")

    def rec(eps, k, algorithm, seed=0):
        return RunRecord("d", k, algorithm, seed, 100.0 + eps, eps, 1.0)

    (row,) = aggregate([rec(e, 2, "a", i) for i, e in enumerate((9.0, 1.0, 2.0))], [2])
    if (row.eps_min, row.eps_median, row.eps_max) != (1.0, 2.0, 9.0):
        problems.append("odd median")
    (row,) = aggregate([rec(e, 2, "a", i) for i, e in enumerate((1.0, 2.0, 3.0, 10.0))], [2])
    if row.eps_median != 2.5:
        problems.append("even median")
    (row,) = aggregate([rec(-1.0, 2, "a")], [2])
    if (row.eps_min, row.eps_median, row.eps_max) != (-1.0, -1.0, -1.0):
        problems.append("negative epsilon")

    ks = [2, 3, 5, 10, 15, 20, 25]
    records = []
    for k in ks:
        records += [rec(e, k, "vns", i) for i, e in enumerate((0.1, 0.2, 0.3) if k != 25 else (0.9, 1.0, 1.1))]
        records += [rec(e, k, "base", i) for i, e in enumerate((0.5, 0.6, 0.7))]
    if count_succ(records, "d", "vns", ks) != (6, 7) or count_succ(records, "d", "base", ks) != (1, 7):
        problems.append("#Succ 6/7")
    if "6/7" not in emit_table(aggregate(records, ks), "text"):
        problems.append("#Succ rendering")
    tied = [rec(1.0, k, a) for k in (2, 3) for a in ("x", "y")]
    if count_succ(tied, "d", "x", [2, 3]) != (2, 2) or count_succ(tied, "d", "y", [2, 3]) != (2, 2):
        problems.append("tie rule")
    report("7", not problems, "all hand-computed values reproduced" if not problems else f"mismatch: {problems}")


MIXTURES = [(20, 2, 20_000, 100), (25, 5, 30_000, 101), (15, 10, 15_000, 102)]


def comparison_spec(tmp_path, n_exec=11, time_limit=0.5, max_iters=None):
    datasets = []
    for i, (comps, n, m, seed) in enumerate(MIXTURES):
        path = tmp_path / f"mix{i}.txt"
        path.write_text(format_mixture_spec(random_mixture_spec(comps, n, m, seed)))
        datasets.append(DatasetSpec(f"mix{i}", f"synthetic:{path.name}", n_features=n, seed=i))
    params = {"sample_size": 1000, "time_limit": time_limit}
    if max_iters is not None:
        params["max_iters"] = max_iters
    return ExperimentSpec(
        datasets=datasets, k_values=[3, 5, 10], n_exec=n_exec, algorithms=["bigvns", "bigmeans"],
        params={"bigvns": dict(params), "bigmeans": dict(params)}, base_seed=8, fstar_starts=10, base_dir=tmp_path,
    )


def test_8_comparative_behavior(report, tmp_path):
    spec = comparison_spec(tmp_path)
    records = run_battery(spec, tmp_path / "out")
    cells = []
    for ds in spec.datasets:
        for k in spec.k_values:
            med = {a: statistics.median(r.epsilon for r in records if (r.dataset, r.k, r.algorithm) == (ds.name, k, a))
                   for a in spec.algorithms}
            cells.append((ds.name, k, med["bigvns"], med["bigmeans"]))
    wins = sum(v <= b for _, _, v, b in cells)
    detail = "; ".join(f"{d} k={k}: {v:.3f} vs {b:.3f}" for d, k, v, b in cells)
    report("8", wins >= 6, f"BigVNSClust median eps <= Big-means in {wins}/9 cells ({detail})")


def test_9_battery_determinism(report, tmp_path):
    spec = comparison_spec(tmp_path, n_exec=2, time_limit=600.0, max_iters=15)
    first = run_battery(spec, tmp_path / "a")
    second = run_battery(spec, tmp_path / "b")
    parallel = run_battery(spec, tmp_path / "c", jobs=2)
    objectives = [r.objective for r in first]
    same = objectives == [r.objective for r in second] == [r.objective for r in parallel]
    ok = same and all(r.error is None for r in first) and not any(math.isnan(f) for f in objectives)
    report("9", ok, f"{len(first)} run objectives {'identical' if same else 'DIFFER'} across serial, repeat and parallel batteries")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
