"""Shared test utilities: exact laws, planted instances, a geometric-median solver."""

import numpy as np

from bigreedy.data import MixtureSpec, gen_mixture
from bigreedy.metric import PointSpace


def tv_distance(counts, weights) -> float:
    p = np.array(counts, dtype=float)
    p /= p.sum()
    w = np.array(weights, dtype=float)
    w /= w.sum()
    return 0.5 * float(np.abs(p - w).sum())


def geometric_median(A, iters: int = 5000, tol: float = 1e-13):
    """Weiszfeld iteration; accurate to ~1e-9 on the small sets used here."""
    w = A.mean(axis=0)
    for _ in range(iters):
        d = np.maximum(np.linalg.norm(A - w, axis=1), 1e-15)
        nxt = (A / d[:, None]).sum(axis=0) / (1 / d).sum()
        if np.linalg.norm(nxt - w) < tol:
            return nxt
        w = nxt
    return w


def two_clusters(seed: int, per: int = 20, gap: float = 10.0):
    r = np.random.default_rng(seed)
    A = r.normal(size=(per, 2)) + [-gap, 0]
    B = r.normal(size=(per, 2)) + [gap, 0]
    return A, B, np.vstack([A, B])


def mixture(k, n_per, dim, seed, space=None, spread=1.0, box=10.0):
    space = space or PointSpace.kmeans(dim)
    return gen_mixture(MixtureSpec(k, n_per, dim, box, spread, seed), space)
