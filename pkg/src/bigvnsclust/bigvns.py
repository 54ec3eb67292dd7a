"""BigVNSClust: variable neighborhood search over sample-restricted K-means landscapes.

Every iteration draws a uniform sample of the data, shakes the incumbent centroids
by re-seeding ``p`` of them (plus any degenerate ones) with greedy K-means++ on the
sample, polishes the result with Lloyd's algorithm on the sample and keeps it if
its sample objective beats the best one seen so far. ``p`` cycles through
``1..p_max`` regardless of acceptance. With ``baseline_mode`` the shaking power is
pinned to 0, which gives the Big-means baseline (degenerate repair only).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import CentroidSet, as_data_matrix, assign_points, draw_sample
from .errors import ClusteringFailure, DegenerateSampleError
from .kmeans import LloydParams, _next_center_index, kmeanspp_seed, lloyd

__all__ = [
    "BigVnsParams",
    "IterationRecord",
    "ClusteringResult",
    "shake_centroids",
    "big_vns_clust",
    "kmeans_full",
]

MAX_SAMPLE_RETRIES = 20


@dataclass(frozen=True)
class BigVnsParams:
    k: int
    s: int
    p_max: int = 3
    T: float = 10.0
    lloyd: LloydParams = field(default_factory=LloydParams)
    seed: int | None = None
    baseline_mode: bool = False
    max_iters: int | None = None  # optional iteration cap on top of the time budget

    def __post_init__(self):
        if self.k < 1 or self.s < 1:
            raise ValueError("k and s must be >= 1")
        if not 1 <= self.p_max <= self.k:
            raise ValueError(f"p_max must satisfy 1 <= p_max <= k, got p_max={self.p_max}, k={self.k}")
        if not self.T > 0:
            raise ValueError("time limit T must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1 when given")


@dataclass
class IterationRecord:
    iteration: int
    p: int
    sample_objective: float
    accepted: bool
    reinitialized: tuple[int, ...]
    prior_degenerate: int
    lloyd_history: list[float]
    elapsed: float


@dataclass
class ClusteringResult:
    centroids: CentroidSet
    labels: np.ndarray
    objective: float
    iterations: int
    elapsed: float
    trace: list[IterationRecord] = field(default_factory=list)

    @property
    def accepted_objectives(self) -> list[float]:
        return [r.sample_objective for r in self.trace if r.accepted]


def shake_centroids(
    C: CentroidSet,
    p: int,
    S,
    lloyd_params: LloydParams,
    rng: np.random.Generator,
) -> tuple[CentroidSet, tuple[int, ...]]:
    """Re-seed every degenerate slot plus ``p`` randomly chosen live slots.

    The ``p`` slots are drawn uniformly without replacement from the
    non-degenerate slots (all of them if fewer than ``p`` remain). Degenerate
    slots are redrawn first, then the chosen ones, each by greedy K-means++ on
    ``S`` conditioned on every center fixed so far. Returns the shaken set and
    the re-seeded slot indices in the order they were drawn.
    """
    if not 0 <= p <= C.k:
        raise ValueError(f"shaking power must satisfy 0 <= p <= k, got {p}")
    S = np.ascontiguousarray(S, dtype=np.float64)
    degenerate = C.degenerate_slots
    live = np.flatnonzero(C.active)
    chosen = []
    if p and len(live):
        chosen = [int(j) for j in rng.choice(live, size=min(p, len(live)), replace=False)]
    order = degenerate + chosen
    if not order:
        return C, ()

    keep = np.ones(C.k, dtype=bool)
    keep[order] = False
    keep &= C.active
    if keep.any():
        closest = _kernels.closest_sqdist(S, np.ascontiguousarray(C.centers[keep]))
    else:
        closest = np.full(S.shape[0], np.inf)
    updates = {}
    for j in order:
        row, closest = _next_center_index(S, closest, lloyd_params.candidates, rng)
        updates[j] = S[row]
    return C.replace(updates), tuple(order)


def _repair(X, C, params: BigVnsParams, rng) -> CentroidSet:
    for _ in range(MAX_SAMPLE_RETRIES):
        S = X[draw_sample(X.shape[0], params.s, rng)]
        try:
            C, _ = shake_centroids(C, 0, S, params.lloyd, rng)
            return C
        except DegenerateSampleError:
            continue
    raise ClusteringFailure("could not repair degenerate centroids")


def big_vns_clust(X, params: BigVnsParams) -> ClusteringResult:
    """Cluster ``X`` into ``params.k`` groups within a ``params.T`` second budget.

    At least one iteration always runs; the loop then stops as soon as the
    budget (or ``params.max_iters``) is exhausted. Runs with the same seed and
    an iteration cap that binds before the time budget are bit-identical.
    """
    X = as_data_matrix(X)
    m, n = X.shape
    k, s = params.k, params.s
    if s > m:
        raise ValueError(f"sample size {s} exceeds the number of points {m}")
    if k > s:
        raise ValueError(f"k={k} exceeds the sample size {s}")

    rng = np.random.default_rng(params.seed)
    start = time.perf_counter()
    C = CentroidSet.degenerate(k, n)
    f_best = math.inf
    p = 0 if params.baseline_mode else 1
    trace: list[IterationRecord] = []
    failures = 0
    t = 0
    while True:
        S = X[draw_sample(m, s, rng)]
        prior_degenerate = C.n_degenerate
        try:
            shaken, reinit = shake_centroids(C, p, S, params.lloyd, rng)
        except DegenerateSampleError:
            failures += 1
            if failures > MAX_SAMPLE_RETRIES:
                raise ClusteringFailure("repeatedly drew samples with too few distinct points")
            continue
        failures = 0
        out = lloyd(S, shaken, params.lloyd)
        accepted = out.objective < f_best
        if accepted:
            C = out.centroids
            f_best = out.objective
        elapsed = time.perf_counter() - start
        trace.append(
            IterationRecord(t, p, out.objective, accepted, reinit, prior_degenerate, out.history, elapsed)
        )
        t += 1
        if not params.baseline_mode:
            p = p + 1 if p < params.p_max else 1
        if elapsed >= params.T or (params.max_iters is not None and t >= params.max_iters):
            break

    if C.n_degenerate:
        C = _repair(X, C, params, rng)
    labels, f = assign_points(X, C)
    return ClusteringResult(C, labels, f, t, time.perf_counter() - start, trace)


def kmeans_full(
    X,
    k: int,
    lloyd_params: LloydParams | None = None,
    rng: np.random.Generator | None = None,
    init: CentroidSet | None = None,
) -> ClusteringResult:
    """Plain K-means on the whole dataset (K-means++ seeding unless ``init`` is given).

    Clusters that empty out during Lloyd are re-seeded with K-means++ on the full
    data and Lloyd is resumed, at most ``k`` times.
    """
    X = as_data_matrix(X)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f"k must satisfy 1 <= k <= m, got k={k}")
    lloyd_params = lloyd_params or LloydParams()
    rng = rng if rng is not None else np.random.default_rng()
    start = time.perf_counter()
    C = init if init is not None else kmeanspp_seed(X, k, lloyd_params, rng)
    if C.k != k:
        raise ValueError(f"initial centroid set has {C.k} slots, expected {k}")
    out = lloyd(X, C, lloyd_params)
    iterations = out.iterations
    trace = [IterationRecord(0, 0, out.objective, True, (), C.n_degenerate, out.history, 0.0)]
    for _ in range(k):
        if not out.centroids.n_degenerate:
            break
        prior = out.centroids.n_degenerate
        try:
            C, reinit = shake_centroids(out.centroids, 0, X, lloyd_params, rng)
        except DegenerateSampleError as exc:
            raise ClusteringFailure("data has fewer distinct points than clusters") from exc
        out = lloyd(X, C, lloyd_params)
        iterations += out.iterations
        trace.append(IterationRecord(len(trace), 0, out.objective, True, reinit, prior, out.history, 0.0))
    if out.centroids.n_degenerate:
        raise ClusteringFailure("K-means kept producing empty clusters")
    labels, f = assign_points(X, out.centroids)
    return ClusteringResult(out.centroids, labels, f, iterations, time.perf_counter() - start, trace)
