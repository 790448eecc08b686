"""Clustering cost and the incremental nearest-center cache."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import EmptyCentersError, EmptyClusterError
from .metric import EUCLIDEAN, PointSpace

# Upper bound on floats materialized per candidate chunk.  Chunk width depends
# only on (n, d), never on the thread count, so reductions are reproducible.
_CHUNK_FLOATS = 4_000_000
_MAX_CHUNK = 256


@dataclass(frozen=True, eq=False)
class NearestCache:
    space: PointSpace
    points: np.ndarray
    centers: np.ndarray
    nearest_dist: np.ndarray
    nearest_idx: np.ndarray  # -1 while there are no centers

    @property
    def n_centers(self) -> int:
        return len(self.centers)

    @property
    def has_centers(self) -> bool:
        return len(self.centers) > 0

    @property
    def total_cost(self) -> float:
        """Sum of nearest distances; ``inf`` when there are no centers and X is nonempty."""
        if len(self.points) == 0:
            return 0.0
        if not self.has_centers:
            return math.inf
        return float(self.nearest_dist.sum())


def _empty_centers(space: PointSpace) -> np.ndarray:
    if space.kind == EUCLIDEAN:
        return np.empty((0, space.dim))
    return np.empty(0, dtype=np.intp)


def build_cache(space: PointSpace, X, C=()) -> NearestCache:
    X = space.as_points(X)
    C = space.as_points(C) if len(C) else _empty_centers(space)
    n = len(X)
    nearest = np.full(n, math.inf)
    idx = np.full(n, -1, dtype=np.intp)
    for j in range(len(C)):
        d = space.delta_to(X, C[j])
        better = d < nearest
        nearest = np.where(better, d, nearest)
        idx = np.where(better, j, idx)
    for arr in (nearest, idx):
        arr.setflags(write=False)
    return NearestCache(space, X, C, nearest, idx)


def add_center(cache: NearestCache, c) -> NearestCache:
    """Return a new cache for ``C + [c]``; duplicates are appended, not merged."""
    space = cache.space
    c = space.as_point(c)
    d = space.delta_to(cache.points, c)
    better = d < cache.nearest_dist
    nearest = np.where(better, d, cache.nearest_dist)
    idx = np.where(better, cache.n_centers, cache.nearest_idx)
    if space.kind == EUCLIDEAN:
        centers = np.vstack([cache.centers, c[None, :]])
    else:
        centers = np.append(cache.centers, np.intp(c))
    for arr in (centers, nearest, idx):
        arr.setflags(write=False)
    return NearestCache(space, cache.points, centers, nearest, idx)


def candidate_cost(cache: NearestCache, c) -> float:
    """``cost(X, C + [c])`` without touching the cache."""
    c = cache.space.as_point(c)
    d = cache.space.delta_to(cache.points, c)
    return float(np.minimum(d, cache.nearest_dist).sum())


def _chunk_width(cache: NearestCache) -> int:
    space = cache.space
    per_col = max(1, len(cache.points)) * (space.dim if space.kind == EUCLIDEAN else 1)
    return int(max(1, min(_MAX_CHUNK, _CHUNK_FLOATS // per_col)))


def candidate_costs(cache: NearestCache, Y, threads: int = 1) -> np.ndarray:
    """Vector of ``cost(X, C + [y])`` for every candidate ``y`` in ``Y``."""
    space = cache.space
    Y = space.as_points(Y)
    m = len(Y)
    if m == 0:
        return np.empty(0)
    if len(cache.points) == 0:
        return np.zeros(m)
    width = _chunk_width(cache)
    starts = list(range(0, m, width))
    nd = cache.nearest_dist[:, None]

    def work(s):
        D = space.pairwise_delta(cache.points, Y[s : s + width])
        return np.minimum(D, nd).sum(axis=0)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    return np.concatenate(parts)


def cost(space: PointSpace, X, C) -> float:
    if len(C) == 0:
        raise EmptyCentersError("cost needs at least one center")
    return build_cache(space, X, C).total_cost


def normalized_cost(space: PointSpace, A, C) -> float:
    """``(cost(A, C) / |A|) ** (1/q)``."""
    if len(A) == 0:
        raise EmptyClusterError("normalized cost of an empty set")
    return (cost(space, A, C) / len(A)) ** (1.0 / space.q)


def assign(space: PointSpace, X, C) -> list[list[int]]:
    """Partition point indices of ``X`` by nearest center, lowest center index on ties."""
    if len(C) == 0:
        raise EmptyCentersError("assign needs at least one center")
    cache = build_cache(space, X, C)
    parts: list[list[int]] = [[] for _ in range(cache.n_centers)]
    for i, j in enumerate(cache.nearest_idx):
        parts[j].append(i)
    return parts


def distinct_count(space: PointSpace, C) -> int:
    C = space.as_points(C) if len(C) else _empty_centers(space)
    if len(C) == 0:
        return 0
    return len(np.unique(C, axis=0)) if space.kind == EUCLIDEAN else len(np.unique(C))
