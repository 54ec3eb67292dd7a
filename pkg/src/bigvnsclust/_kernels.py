# Compiled loops for the distance / assignment / update hot paths.
#
# Every reduction is a plain sequential loop in float64 (no fastmath), so results
# are bit-reproducible and match a straightforward Python loop over the same data.
# Points are scanned in index order; centroid slots in ascending slot order.

import numpy as np
from numba import njit


@njit(cache=True)
def sqdist(a, b):
    d = 0.0
    for t in range(a.shape[0]):
        diff = a[t] - b[t]
        d += diff * diff
    return d


@njit(cache=True)
def assign(X, C, active):
    m, n = X.shape
    k = C.shape[0]
    labels = np.empty(m, dtype=np.int64)
    f = 0.0
    for i in range(m):
        best = np.inf
        best_j = -1
        for j in range(k):
            if not active[j]:
                continue
            d = 0.0
            for t in range(n):
                diff = X[i, t] - C[j, t]
                d += diff * diff
            if d < best:
                best = d
                best_j = j
        labels[i] = best_j
        f += best
    return labels, f


@njit(cache=True)
def objective(X, C, active):
    m, n = X.shape
    k = C.shape[0]
    f = 0.0
    for i in range(m):
        best = np.inf
        for j in range(k):
            if not active[j]:
                continue
            d = 0.0
            for t in range(n):
                diff = X[i, t] - C[j, t]
                d += diff * diff
            if d < best:
                best = d
        f += best
    return f


@njit(cache=True)
def means(X, labels, k):
    m, n = X.shape
    sums = np.zeros((k, n))
    counts = np.zeros(k, dtype=np.int64)
    for i in range(m):
        j = labels[i]
        counts[j] += 1
        for t in range(n):
            sums[j, t] += X[i, t]
    active = counts > 0
    for j in range(k):
        if counts[j] > 0:
            for t in range(n):
                sums[j, t] = sums[j, t] / counts[j]
    return sums, active


@njit(cache=True)
def closest_sqdist(S, U):
    s, n = S.shape
    out = np.empty(s)
    for i in range(s):
        best = np.inf
        for j in range(U.shape[0]):
            d = 0.0
            for t in range(n):
                diff = S[i, t] - U[j, t]
                d += diff * diff
            if d < best:
                best = d
        out[i] = best
    return out


@njit(cache=True)
def candidate_potentials(S, candidates, closest):
    """Objective over S of the fixed set plus each candidate point (row index into S)."""
    s, n = S.shape
    pots = np.empty(candidates.shape[0])
    for c in range(candidates.shape[0]):
        row = candidates[c]
        pot = 0.0
        for i in range(s):
            d = 0.0
            for t in range(n):
                diff = S[i, t] - S[row, t]
                d += diff * diff
            if closest[i] < d:
                d = closest[i]
            pot += d
        pots[c] = pot
    return pots
