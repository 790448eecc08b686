"""Exhaustive ground truth for tiny instances.

Size limits are hard errors: an oracle that silently truncates is not an oracle.
"""

from __future__ import annotations

import math
from itertools import combinations, combinations_with_replacement

import numpy as np

from .exceptions import BudgetExceededError, UnsupportedSpaceError
from .metric import PointSpace
from .selectors import ceil_count

MEDOID_MAX_POINTS = 16
KMEANS_MAX_POINTS = 10
TWO_MEANS_MAX_POINTS = 26
INABA_MAX_MULTISETS = 1_000_000


def brute_force_medoids(space: PointSpace, X, k: int):
    """Best ``k`` centers drawn from ``X`` itself.

    Returns ``(centers, cost, indices)``; ties go to the lexicographically
    smallest index tuple.
    """
    X = space.as_points(X)
    n = len(X)
    if n > MEDOID_MAX_POINTS:
        raise BudgetExceededError("brute_force_medoids points", n, MEDOID_MAX_POINTS)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= |X|, got k={k}, |X|={n}")
    D = space.pairwise_delta(X, X)
    best, best_combo = math.inf, None
    for combo in combinations(range(n), k):
        c = float(D[:, combo].min(axis=1).sum())
        if c < best:
            best, best_combo = c, combo
    return X[list(best_combo)], best, list(best_combo)


def restricted_growth_strings(n: int, k: int) -> np.ndarray:
    """All set partitions of ``n`` items into at most ``k`` blocks, as label rows.

    Row ``r`` labels item ``i`` with block ``r[i]``; labels follow the canonical
    restricted-growth form ``r[0] = 0, r[i] <= 1 + max(r[:i])``.
    """
    if n == 0:
        return np.zeros((1, 0), dtype=np.intp)
    rows = [[0]]
    maxes = [0]
    for _ in range(1, n):
        nxt, nmax = [], []
        for row, mx in zip(rows, maxes):
            for lab in range(min(mx + 2, k)):
                nxt.append(row + [lab])
                nmax.append(max(mx, lab))
        rows, maxes = nxt, nmax
    return np.asarray(rows, dtype=np.intp)


def _require_kmeans(space: PointSpace):
    if not space.is_kmeans:
        raise UnsupportedSpaceError("this oracle needs a k-means space")


def brute_force_kmeans(space: PointSpace, X, k: int):
    """Optimal k-means clustering by enumerating every partition into <= k parts.

    Returns ``(partition, means, cost)`` with the partition as lists of point
    indices; the first optimum in enumeration order wins.
    """
    _require_kmeans(space)
    X = space.as_points(X)
    n = len(X)
    if n > KMEANS_MAX_POINTS:
        raise BudgetExceededError("brute_force_kmeans points", n, KMEANS_MAX_POINTS)
    if n == 0 or k < 1:
        raise ValueError("need a nonempty X and k >= 1")
    kk = min(k, n)
    labels = restricted_growth_strings(n, kk)  # (P, n)
    onehot = labels[:, :, None] == np.arange(kk)[None, None, :]  # (P, n, kk)
    counts = onehot.sum(axis=1)  # (P, kk)
    sums = np.einsum("pnk,nd->pkd", onehot.astype(float), X)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = sums / counts[:, :, None]
    per_point = np.take_along_axis(means, labels[:, :, None], axis=1)  # (P, n, d)
    diff = X[None, :, :] - per_point
    costs = np.sum(diff * diff, axis=(1, 2))
    best = int(np.argmin(costs))
    row = labels[best]
    parts = [list(np.flatnonzero(row == j)) for j in range(int(row.max()) + 1)]
    parts = [[int(i) for i in part] for part in parts]
    mus = np.stack([X[part].sum(axis=0) / len(part) for part in parts])
    cost = sum(float(np.sum((X[part] - mus[j]) ** 2)) for j, part in enumerate(parts))
    return parts, mus, cost


def brute_force_two_means(space: PointSpace, X):
    """Optimal 2-means clustering by enumerating all ``2^(n-1)`` bipartitions.

    Uses ``phi = sum ||x||^2 - |S| ||mu_S||^2 - |T| ||mu_T||^2`` with subset sums
    assembled from two halves, so instances up to ``TWO_MEANS_MAX_POINTS`` points
    stay cheap.  Returns ``(partition, means, cost)`` like ``brute_force_kmeans``;
    the winning partition's cost is recomputed directly from its means.
    """
    _require_kmeans(space)
    X = space.as_points(X)
    n = len(X)
    if n > TWO_MEANS_MAX_POINTS:
        raise BudgetExceededError("brute_force_two_means points", n, TWO_MEANS_MAX_POINTS)
    if n < 2:
        return brute_force_kmeans(space, X, 2)
    # point 0 always sits in part S; the others are split into two halves of bits
    rest = X[1:]
    h = (n - 1) // 2
    lo_pts, hi_pts = rest[:h], rest[h:]

    def subset_sums(P):
        bits = (np.arange(2 ** len(P))[:, None] >> np.arange(len(P))[None, :]) & 1
        return bits.astype(float) @ P, bits.sum(axis=1)

    lo_sum, lo_cnt = subset_sums(lo_pts)
    hi_sum, hi_cnt = subset_sums(hi_pts)
    total = X.sum(axis=0)
    best, best_key = math.inf, None
    for i in range(len(hi_sum)):
        s = X[0] + hi_sum[i] + lo_sum  # (L, d)
        cnt = 1 + hi_cnt[i] + lo_cnt
        other = n - cnt
        t = total - s
        gain = np.einsum("ld,ld->l", s, s) / cnt
        with np.errstate(invalid="ignore", divide="ignore"):
            gain_t = np.where(other > 0, np.einsum("ld,ld->l", t, t) / np.maximum(other, 1), 0.0)
        score = -(gain + gain_t)
        j = int(np.argmin(score))
        if score[j] < best:
            best, best_key = float(score[j]), (i, j)
    i, j = best_key
    in_s = np.zeros(n, dtype=bool)
    in_s[0] = True
    in_s[1:][:h] = (j >> np.arange(h)) & 1 == 1
    in_s[1:][h:] = (i >> np.arange(n - 1 - h)) & 1 == 1
    parts = [[int(v) for v in np.flatnonzero(in_s)]]
    if (~in_s).any():
        parts.append([int(v) for v in np.flatnonzero(~in_s)])
    mus = np.stack([X[part].sum(axis=0) / len(part) for part in parts])
    cost = sum(float(np.sum((X[part] - mus[j]) ** 2)) for j, part in enumerate(parts))
    return parts, mus, cost


def inaba_search(space: PointSpace, A, epsilon: float):
    """Best mean of a size-``ceil(1/epsilon)`` multiset of ``A``.

    Returns ``(best_mean, ratio)`` with ``ratio = phi_A(best) / phi_A(mean(A))``
    (1 when the denominator is zero).
    """
    _require_kmeans(space)
    A = space.as_points(A)
    n = len(A)
    if n == 0:
        raise ValueError("inaba_search needs a nonempty A")
    m = ceil_count(1 / epsilon)
    total = math.comb(n + m - 1, m)
    if total > INABA_MAX_MULTISETS:
        raise BudgetExceededError("inaba_search multisets", total, INABA_MAX_MULTISETS)
    idx = np.asarray(list(combinations_with_replacement(range(n), m)), dtype=np.intp)
    means = A[idx].sum(axis=1) / m  # (M, d)
    costs = space.pairwise_delta(A, means).sum(axis=0)
    best = int(np.argmin(costs))
    base = float(space.delta_to(A, space.mean(A)).sum())
    ratio = 1.0 if base == 0 else float(costs[best]) / base
    return means[best], ratio
