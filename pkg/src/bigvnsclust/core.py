"""Data and solution representations for minimum sum-of-squares clustering.

A dataset is a plain ``(m, n)`` float64 numpy array (see :func:`as_data_matrix`).
A solution is a :class:`CentroidSet`: ``k`` slots, each holding either a point
in R^n or the explicit *degenerate* marker for an empty cluster.

The assignment scan is sequential over points; no internal parallelism is used,
so objective sums are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InvalidSolutionError

__all__ = [
    "CentroidSet",
    "as_data_matrix",
    "squared_distance",
    "assign_points",
    "objective",
    "update_centroids",
    "draw_sample",
]


def as_data_matrix(X) -> np.ndarray:
    """Validate ``X`` and return it as a read-only, C-contiguous float64 matrix."""
    arr = np.array(X, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise ValueError(f"data must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"data must have at least one point and one feature, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("data contains NaN or infinite values")
    arr.flags.writeable = False
    return arr


def _as_float_rows(X) -> np.ndarray:
    # internal fast path: accept already-validated arrays without copying
    if isinstance(X, np.ndarray) and X.dtype == np.float64 and X.ndim == 2 and X.flags.c_contiguous:
        return X
    return np.ascontiguousarray(X, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class CentroidSet:
    """``k`` centroid slots; ``active[j]`` is False when slot ``j`` is degenerate.

    Coordinates stored for a degenerate slot are meaningless and never read.
    Instances are immutable; use :meth:`replace` to derive a modified copy.
    """

    centers: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64, order="C")
        active = np.array(self.active, dtype=np.bool_)
        if centers.ndim != 2 or active.shape != (centers.shape[0],):
            raise ValueError("centers must be (k, n) and active must be (k,)")
        if centers.shape[0] < 1:
            raise ValueError("a centroid set needs at least one slot")
        centers[~active] = 0.0
        if not np.isfinite(centers).all():
            raise ValueError("centroid coordinates must be finite")
        centers.flags.writeable = False
        active.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "active", active)

    @classmethod
    def degenerate(cls, k: int, n: int) -> CentroidSet:
        return cls(np.zeros((k, n)), np.zeros(k, dtype=bool))

    @classmethod
    def from_points(cls, points) -> CentroidSet:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2:
            raise ValueError("points must be a (k, n) array")
        return cls(points, np.ones(points.shape[0], dtype=bool))

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def n(self) -> int:
        return self.centers.shape[1]

    @property
    def degenerate_slots(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(~self.active)]

    @property
    def n_degenerate(self) -> int:
        return int(self.k - np.count_nonzero(self.active))

    def is_degenerate(self, j: int) -> bool:
        return not self.active[j]

    def point(self, j: int) -> np.ndarray:
        if not self.active[j]:
            raise InvalidSolutionError(f"slot {j} is degenerate")
        return self.centers[j].copy()

    def points(self) -> np.ndarray:
        """Coordinates of the non-degenerate slots, in slot order."""
        return self.centers[self.active].copy()

    def replace(self, updates: dict[int, Sequence[float] | None]) -> CentroidSet:
        """New set with slot ``j`` set to ``updates[j]`` (``None`` marks it degenerate)."""
        centers = self.centers.copy()
        active = self.active.copy()
        for j, value in updates.items():
            if value is None:
                active[j] = False
            else:
                value = np.asarray(value, dtype=np.float64)
                if value.shape != (self.n,):
                    raise ValueError(f"slot {j}: expected {self.n} coordinates, got shape {value.shape}")
                centers[j] = value
                active[j] = True
        return CentroidSet(centers, active)

    def same_as(self, other: CentroidSet) -> bool:
        """Bitwise equality of slot states and active coordinates."""
        return (
            self.centers.shape == other.centers.shape
            and np.array_equal(self.active, other.active)
            and np.array_equal(self.centers[self.active], other.centers[other.active])
        )

    def __repr__(self) -> str:
        slots = [
            "Degenerate" if not a else "(" + ", ".join(f"{v:.6g}" for v in c) + ")"
            for c, a in zip(self.centers, self.active)
        ]
        return f"CentroidSet([{', '.join(slots)}])"


def _check_solution(X: np.ndarray, C: CentroidSet) -> None:
    if C.n != X.shape[1]:
        raise ValueError(f"dimension mismatch: data has {X.shape[1]} features, centroids have {C.n}")
    if not C.active.any():
        raise InvalidSolutionError("all centroid slots are degenerate")


def squared_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(_kernels.sqdist(a, b))


def assign_points(X, C: CentroidSet) -> tuple[np.ndarray, float]:
    """Label every point with its nearest non-degenerate centroid.

    Ties go to the lowest slot index. Returns ``(labels, f)`` where ``f`` is the
    sum of the per-point minimum squared distances.
    """
    X = _as_float_rows(X)
    _check_solution(X, C)
    labels, f = _kernels.assign(X, C.centers, C.active)
    return labels, float(f)


def objective(X, C: CentroidSet) -> float:
    """Sum of squared distances from each point to its nearest centroid."""
    X = _as_float_rows(X)
    _check_solution(X, C)
    return float(_kernels.objective(X, C.centers, C.active))


def update_centroids(X, labels, k: int) -> CentroidSet:
    """Move each slot to the mean of its points; slots with no points become degenerate."""
    X = _as_float_rows(X)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if labels.shape != (X.shape[0],):
        raise ValueError("labels must have one entry per point")
    if k < 1 or (labels.size and (labels.min() < 0 or labels.max() >= k)):
        raise ValueError(f"labels must lie in [0, {k})")
    centers, active = _kernels.means(X, labels, k)
    return CentroidSet(centers, active)


def draw_sample(m: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of a uniform random size-``s`` subset of ``range(m)`` (no repeats)."""
    if not 1 <= s <= m:
        raise ValueError(f"sample size must satisfy 1 <= s <= m, got s={s}, m={m}")
    return rng.choice(m, size=s, replace=False)
