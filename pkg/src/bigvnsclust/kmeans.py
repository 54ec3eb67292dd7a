"""Greedy K-means++ seeding and Lloyd's local search."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import CentroidSet, _as_float_rows, _check_solution
from .errors import DegenerateSampleError, SeedingError

__all__ = ["LloydParams", "LloydOutcome", "kmeanspp_next_center", "kmeanspp_seed", "lloyd"]


@dataclass(frozen=True)
class LloydParams:
    max_iters: int = 300
    rel_tol: float = 1e-4
    candidates: int = 3

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be >= 0")
        if self.candidates < 1:
            raise ValueError("candidates must be >= 1")


@dataclass
class LloydOutcome:
    centroids: CentroidSet
    objective: float
    iterations: int
    converged: bool
    labels: np.ndarray
    history: list[float] = field(default_factory=list)


def _next_center_index(S, closest, candidates, rng):
    """Pick a row of S by greedy D² sampling; ``closest`` holds squared distances to U.

    Returns ``(row, new_closest)``. ``closest`` is all +inf when U is empty.
    """
    s = S.shape[0]
    if np.isinf(closest[0]):
        cand = rng.integers(0, s, size=candidates)
    else:
        cum = np.cumsum(closest)
        total = cum[-1]
        if not total > 0.0:
            raise DegenerateSampleError("every sample point coincides with a fixed center")
        # side="right" never lands on a zero-weight point
        cand = np.searchsorted(cum, rng.random(candidates) * total, side="right")
        np.minimum(cand, s - 1, out=cand)
    cand = np.ascontiguousarray(cand, dtype=np.int64)
    pots = _kernels.candidate_potentials(S, cand, closest)
    row = int(cand[int(np.argmin(pots))])
    d_new = _kernels.closest_sqdist(S, S[row : row + 1])
    return row, np.minimum(closest, d_new)


def _closest_to(S, U):
    if U is None or len(U) == 0:
        return np.full(S.shape[0], np.inf)
    return _kernels.closest_sqdist(S, np.ascontiguousarray(U, dtype=np.float64))


def kmeanspp_next_center(S, U, params: LloydParams, rng: np.random.Generator) -> np.ndarray:
    """Draw one new center from ``S`` given the fixed centers ``U`` (may be empty).

    ``params.candidates`` points are drawn with probability proportional to their
    squared distance to ``U`` (uniformly if ``U`` is empty); the one giving the
    lowest objective of ``U`` plus the candidate over ``S`` is returned.
    """
    S = _as_float_rows(S)
    if U is not None and len(U) and np.shape(U)[-1] != S.shape[1]:
        raise ValueError("dimension mismatch between sample and fixed centers")
    row, _ = _next_center_index(S, _closest_to(S, U), params.candidates, rng)
    return S[row].copy()


def kmeanspp_seed(S, k: int, params: LloydParams, rng: np.random.Generator) -> CentroidSet:
    S = _as_float_rows(S)
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(np.unique(S, axis=0)) < k:
        raise SeedingError(f"sample has fewer than {k} distinct points")
    closest = np.full(S.shape[0], np.inf)
    rows = []
    for _ in range(k):
        row, closest = _next_center_index(S, closest, params.candidates, rng)
        rows.append(row)
    return CentroidSet.from_points(S[rows])


def lloyd(S, C_init: CentroidSet, params: LloydParams) -> LloydOutcome:
    """Lloyd iterations on ``S`` starting from ``C_init``.

    Stops once the relative improvement ``(f_prev - f) / f_prev`` drops below
    ``params.rel_tol``, the objective reaches zero, or ``params.max_iters`` update
    steps were made. Clusters that empty out stay degenerate. If an update step
    ever raises the objective (possible only through rounding), that step is
    discarded, so the reported history is non-increasing.
    """
    S = _as_float_rows(S)
    _check_solution(S, C_init)
    k = C_init.k
    centers, active = C_init.centers, C_init.active
    labels, f = _kernels.assign(S, centers, active)
    history = [f]
    iterations = 0
    converged = False
    while iterations < params.max_iters:
        if f == 0.0:
            converged = True
            break
        new_centers, new_active = _kernels.means(S, labels, k)
        new_labels, f_new = _kernels.assign(S, new_centers, new_active)
        iterations += 1
        if f_new > f:
            converged = True
            break
        improvement = (f - f_new) / f
        centers, active, labels, f = new_centers, new_active, new_labels, f_new
        history.append(f)
        if improvement < params.rel_tol:
            converged = True
            break
    return LloydOutcome(
        centroids=CentroidSet(centers, active) if iterations else C_init,
        objective=float(f),
        iterations=iterations,
        converged=converged,
        labels=labels,
        history=[float(v) for v in history],
    )
