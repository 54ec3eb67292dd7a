"""Problem-agnostic variable neighborhood search kernel.

Solutions are arbitrary Python objects. A problem supplies

* ``f``: solution -> float, the objective to minimize;
* shaking neighborhoods: a sequence of samplers ``(x, rng) -> x'``, where entry
  ``p - 1`` draws from the ``p``-th shaking neighborhood of ``x``;
* improvement neighborhoods: a sequence of functions ``x -> iterable`` that
  enumerate a finite neighborhood of ``x``.

Neighborhood indices are 1-based throughout, as is customary for VNS.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .errors import ShakingError

__all__ = [
    "VnsProblem",
    "VnsState",
    "discrete_sampler",
    "shake",
    "neighborhood_change_sequential",
    "neighborhood_change_cyclic",
    "best_improvement_local_search",
    "b_vnd",
    "basic_vns",
]

Objective = Callable[[Any], float]
Sampler = Callable[[Any, np.random.Generator], Any]
Neighborhood = Callable[[Any], Iterable[Any]]
ChangePolicy = Callable[[Any, Any, int, Objective], "tuple[Any, int]"]


@dataclass
class VnsProblem:
    f: Objective
    shake_neighborhoods: Sequence[Sampler]
    improve_neighborhoods: Sequence[Neighborhood]

    @property
    def k_max(self) -> int:
        return len(self.shake_neighborhoods)

    @property
    def l_max(self) -> int:
        return len(self.improve_neighborhoods)


@dataclass
class VnsState:
    incumbent: Any
    incumbent_value: float
    neighborhood_index: int = 1
    iterations: int = 0
    history: list[float] = field(default_factory=list)


def discrete_sampler(members: Neighborhood, weights: Callable[[Any, list], Sequence[float]] | None = None) -> Sampler:
    """Turn an enumerable neighborhood into a shaking sampler.

    ``weights(x, members)`` gives unnormalized probabilities; uniform when omitted.
    """

    def sample(x, rng):
        pool = list(members(x))
        if not pool:
            raise ShakingError("empty shaking neighborhood")
        if weights is None:
            return pool[int(rng.integers(len(pool)))]
        w = np.asarray(weights(x, pool), dtype=float)
        return pool[int(rng.choice(len(pool), p=w / w.sum()))]

    return sample


def shake(x, p: int, neighborhoods: Sequence[Sampler], rng: np.random.Generator):
    """Random member of the ``p``-th shaking neighborhood of ``x``."""
    if not 1 <= p <= len(neighborhoods):
        raise ValueError(f"neighborhood index {p} outside 1..{len(neighborhoods)}")
    return neighborhoods[p - 1](x, rng)


def neighborhood_change_sequential(x, x_new, p: int, f: Objective):
    if f(x_new) < f(x):
        return x_new, 1
    return x, p + 1


def neighborhood_change_cyclic(x, x_new, p: int, f: Objective):
    if f(x_new) < f(x):
        return x_new, p + 1
    return x, p + 1


def _best_of(neighborhood: Iterable, f: Objective):
    best, best_val = None, np.inf
    for y in neighborhood:
        val = f(y)
        if val < best_val:
            best, best_val = y, val
    return best, best_val


def best_improvement_local_search(x, neighborhood: Neighborhood, f: Objective):
    """Move to the best neighbor while that strictly improves ``f``."""
    fx = f(x)
    while True:
        y, fy = _best_of(neighborhood(x), f)
        if y is None or not fy < fx:
            return x
        x, fx = y, fy


def b_vnd(x, neighborhoods: Sequence[Neighborhood], f: Objective, change: ChangePolicy = neighborhood_change_sequential):
    """Sequential variable neighborhood descent with best-improvement moves.

    Runs passes over ``N_1 .. N_lmax`` until a complete pass leaves the incumbent
    unchanged, so the result is a local optimum for every neighborhood.
    """
    l_max = len(neighborhoods)
    if l_max < 1:
        raise ValueError("at least one improvement neighborhood is required")
    while True:
        start_val = f(x)
        l = 1
        while l <= l_max:
            y, _ = _best_of(neighborhoods[l - 1](x), f)
            if y is None:
                l += 1
                continue
            x, l = change(x, y, l, f)
        if not f(x) < start_val:
            return x


def basic_vns(
    x,
    k_max: int,
    T: float,
    shake_neighborhoods: Sequence[Sampler],
    local_search: Callable[[Any], Any],
    f: Objective,
    rng: np.random.Generator,
    change: ChangePolicy = neighborhood_change_sequential,
    max_iterations: int | None = None,
) -> VnsState:
    """Shake, improve and change neighborhood until ``T`` seconds have elapsed.

    The shaking index wraps back to 1 after ``k_max``. ``max_iterations`` adds an
    optional cap on shake/improve rounds (useful for reproducible runs).
    """
    if T <= 0:
        raise ValueError("time limit must be positive")
    if not 1 <= k_max <= len(shake_neighborhoods):
        raise ValueError("k_max must lie in 1..len(shake_neighborhoods)")
    state = VnsState(x, f(x))
    state.history.append(state.incumbent_value)
    start = time.perf_counter()
    p = 1
    while time.perf_counter() - start <= T:
        if max_iterations is not None and state.iterations >= max_iterations:
            break
        x_shaken = shake(state.incumbent, p, shake_neighborhoods, rng)
        x_local = local_search(x_shaken)
        state.incumbent, p = change(state.incumbent, x_local, p, f)
        if p > k_max:
            p = 1
        state.incumbent_value = f(state.incumbent)
        state.neighborhood_index = p
        state.iterations += 1
        state.history.append(state.incumbent_value)
    return state
