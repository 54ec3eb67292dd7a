"""Small discrete problems with exhaustively known optima for the VNS kernel."""

import math

from bigvnsclust.vns import VnsProblem

GRID = 100


def rugged(point):
    """Bowl plus a periodic ripple: many 8-neighborhood local minima, one global minimum."""
    x, y = point
    bowl = 0.02 * ((x - 71) ** 2 + (y - 38) ** 2)
    ripple = 6.0 * (2.0 - math.cos(2 * math.pi * (x - 71) / 9) - math.cos(2 * math.pi * (y - 38) / 9))
    return bowl + ripple


def grid_moves(radius):
    def neighbors(point):
        x, y = point
        for dx in range(-radius, radius + 1):
            for dy in range(-radius, radius + 1):
                if (dx or dy) and 0 <= x + dx < GRID and 0 <= y + dy < GRID:
                    yield (x + dx, y + dy)

    return neighbors


def box_shake(radius):
    def sample(point, rng):
        x, y = point
        while True:
            nx = x + int(rng.integers(-radius, radius + 1))
            ny = y + int(rng.integers(-radius, radius + 1))
            if (nx, ny) != (x, y) and 0 <= nx < GRID and 0 <= ny < GRID:
                return (nx, ny)

    return sample


def rugged_problem(k_max=6, step=5):
    return VnsProblem(
        f=rugged,
        shake_neighborhoods=[box_shake(step * p) for p in range(1, k_max + 1)],
        improve_neighborhoods=[grid_moves(1)],
    )


def rugged_global_optimum():
    states = [(x, y) for x in range(GRID) for y in range(GRID)]
    best = min(states, key=rugged)
    return best, rugged(best)


# 1-D landscape on 0..39: a basin around 6 and a deeper one around 30 separated by a ridge.
LINE = 40


def line_f(i):
    return min(0.5 * (i - 6) ** 2 + 3.0, 0.05 * (i - 30) ** 2) if 0 <= i < LINE else math.inf


def line_step(i):
    return [j for j in (i - 1, i + 1) if 0 <= j < LINE]


def line_jump(i):
    return [j for j in (i - 20, i + 20) if 0 <= j < LINE]
