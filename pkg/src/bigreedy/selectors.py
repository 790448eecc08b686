"""Candidate-center selection routines for the greedy loop, plus k-means++ seeding.

A selector maps ``(cache, rng)`` to a :class:`Selection`.  ``cache`` carries
the data ``X`` and the current centers, so cost-proportional samplers need no
recomputation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from . import rng as rngmod
from .cost import NearestCache, add_center, build_cache
from .exceptions import BudgetExceededError, UnsupportedSpaceError
from .metric import EUCLIDEAN, PointSpace, norm_ball_sample

DEFAULT_SAMPLE_CAP = 1_000_000
SUBSET_MEANS_LIMIT = 2_000_000

KINDS = ("select_all", "select_pp", "select_uniform", "subset_means", "select_sgd", "select_ball")


def ceil_count(x: float) -> int:
    """``ceil`` that ignores float noise just above an integer (1/0.1**2 -> 100)."""
    return int(math.ceil(x - 1e-9))


@dataclass(frozen=True)
class SelectorSpec:
    kind: str
    epsilon: float | None = None
    k: int | None = None
    m: int | None = None  # override count for select_pp, draw count for select_uniform
    samples: int | None = None
    step_scale: float = 2.0  # select_sgd step size is step_scale * r / sqrt(s)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown selector {self.kind!r}; expected one of {KINDS}")
        eps = self.epsilon
        if self.kind == "select_pp":
            if eps is None or eps <= 0:
                raise ValueError("select_pp needs epsilon > 0")
            if self.k is None or self.k < 1:
                raise ValueError("select_pp needs a positive k")
        if self.kind in ("subset_means", "select_sgd", "select_ball"):
            if eps is None or not 0 < eps < 1:
                raise ValueError(f"{self.kind} needs epsilon in (0, 1)")
        if self.kind == "select_uniform" and (self.m is None or self.m < 1):
            raise ValueError("select_uniform needs m >= 1")
        if self.kind in ("select_sgd", "select_ball") and (self.samples is None or self.samples < 1):
            raise ValueError(f"{self.kind} needs samples >= 1")
        if self.m is not None and self.m < 1:
            raise ValueError("sample count must be >= 1")

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class Selection:
    points: np.ndarray
    nominal_count: float | None = None
    zero_cost: bool = False

    def __len__(self):
        return len(self.points)


# -- sample counts prescribed by the guarantees --------------------------------


def pp_sample_count(k: int, epsilon: float, q: float) -> int:
    return ceil_count(4 * k * ((1 + epsilon) / epsilon) ** (q + 4))


def sgd_sample_count(n: int, epsilon: float) -> int:
    return 2 * n ** (3 + ceil_count(1 / epsilon**2))


def ball_sample_count(n: int, epsilon: float, q: float, d: int, p: float) -> float:
    # hidden constant taken as 1
    return float(n) ** 3 * epsilon ** (-q * d / p)


def boost_count(rho: float) -> int:
    """Draws needed so a per-draw success rate ``rho`` succeeds w.p. >= 1 - 1/e."""
    if not 0 < rho <= 1:
        raise ValueError("rho must be in (0, 1]")
    return ceil_count(1 / rho)


# -- selectors -----------------------------------------------------------------


def select_all(X, C=None):
    return X


def select_uniform(X, spec: SelectorSpec, rng: np.random.Generator) -> Selection:
    n = len(X)
    if n == 0:
        raise ValueError("select_uniform needs a nonempty X")
    return Selection(X[rng.integers(0, n, size=spec.m)], nominal_count=spec.m)


def select_pp(X, cache: NearestCache, spec: SelectorSpec, rng: np.random.Generator) -> Selection:
    """Draw i.i.d. candidates with probability proportional to ``Delta(x, C)``.

    Falls back to uniform draws when there are no centers yet.  When every
    point already sits on a center a single uniform point is returned with
    ``zero_cost`` set.
    """
    X = cache.points if X is None else X
    n = len(X)
    nominal = pp_sample_count(spec.k, spec.epsilon, cache.space.q)
    if spec.m is not None:
        m = spec.m
    else:
        m = nominal
        if m > DEFAULT_SAMPLE_CAP:
            warnings.warn(f"select_pp: capping {m} samples at {DEFAULT_SAMPLE_CAP}", stacklevel=2)
            m = DEFAULT_SAMPLE_CAP
    if not cache.has_centers:
        return Selection(X[rng.integers(0, n, size=m)], nominal_count=nominal)
    w = cache.nearest_dist
    total = float(w.sum())
    if total <= 0:
        return Selection(X[rng.integers(0, n, size=1)], nominal_count=nominal, zero_cost=True)
    idx = rng.choice(n, size=m, p=w / total)
    return Selection(X[idx], nominal_count=nominal)


def subset_means(X, epsilon: float, limit: int = SUBSET_MEANS_LIMIT) -> np.ndarray:
    """Means of all size-``ceil(1/epsilon)`` multisets of rows of ``X``, deduplicated."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("subset_means needs a nonempty (n, d) array")
    n = len(X)
    m = ceil_count(1 / epsilon)
    total = math.comb(n + m - 1, m)
    if total > limit:
        raise BudgetExceededError("subset_means multisets", total, limit)
    idx = np.fromiter(
        (i for combo in combinations_with_replacement(range(n), m) for i in combo),
        dtype=np.intp,
        count=total * m,
    ).reshape(total, m)
    means = X[idx].sum(axis=1) / m
    return np.unique(means, axis=0)


@dataclass
class BallGuess:
    y: object
    y_index: int
    m: int
    b: int
    B: np.ndarray
    B_index: np.ndarray
    r_estimate: float  # phi_B({y}) / m


def ball_guess_from(X, space: PointSpace, y_index: int, b: int, m: int) -> BallGuess:
    """The triple for a fixed anchor and sizes: ``B`` = the ``b`` points nearest ``X[y_index]``."""
    y = X[y_index]
    d = space.delta_to(X, y)
    order = np.argsort(d, kind="stable")[:b]
    return BallGuess(y, int(y_index), int(m), int(b), X[order], order, float(d[order].sum()) / m)


def guess_ball(X, space: PointSpace, rng: np.random.Generator) -> BallGuess:
    n = len(X)
    y_index = int(rng.integers(0, n))
    b = int(rng.integers(1, n + 1))
    m = int(rng.integers(1, n + 1))
    return ball_guess_from(X, space, y_index, b, m)


def _require_euclidean_median(space: PointSpace):
    if space.kind != EUCLIDEAN or space.norm != "l2" or space.p != 1 or space.is_kmeans:
        raise UnsupportedSpaceError("sgd candidates need euclidean l2 with p = 1")


def sgd_ball(
    sample_stream: Callable[[np.random.Generator], np.ndarray],
    space: PointSpace,
    start,
    radius: float,
    steps: int,
    step_size: float,
    rng: np.random.Generator,
    record=None,
) -> np.ndarray:
    """Projected stochastic subgradient descent on ``w -> E ||x - w||_2``.

    Iterates stay in the l2 ball of ``radius`` about ``start``; returns the
    plain average of ``w_1 .. w_steps`` (``w_1 = start``).  If ``record`` is a
    list, every iterate is appended to it.
    """
    _require_euclidean_median(space)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    start = space.as_point(start)
    w = start.copy()
    acc = np.zeros_like(w)
    for i in range(steps):
        acc += w
        if record is not None:
            record.append(w.copy())
        if i == steps - 1:
            break
        x = sample_stream(rng)
        diff = w - x
        nrm = np.linalg.norm(diff)
        if nrm > 0:
            w = w - step_size * diff / nrm
        off = w - start
        dist = np.linalg.norm(off)
        if dist > radius:
            w = start + off * (radius / dist) if radius > 0 else start.copy()
    return acc / steps


def select_sgd(X, space: PointSpace, epsilon: float, samples: int, rng, step_scale: float = 2.0) -> Selection:
    _require_euclidean_median(space)
    n = len(X)
    s = ceil_count(1 / epsilon**2)
    base = rngmod.child_seed(rng)

    def stream_x(r):
        return X[r.integers(0, n)]

    out = np.empty((samples, space.dim))
    for i in range(samples):
        r = rngmod.stream(base, i)
        g = guess_ball(X, space, r)
        radius = g.r_estimate
        out[i] = sgd_ball(stream_x, space, g.y, radius, s, step_scale * radius / math.sqrt(s), r)
    return Selection(out, nominal_count=sgd_sample_count(n, epsilon))


def select_ball(X, space: PointSpace, epsilon: float, samples: int, rng) -> Selection:
    if space.kind != EUCLIDEAN:
        raise UnsupportedSpaceError("select_ball needs a euclidean space")
    n = len(X)
    base = rngmod.child_seed(rng)
    out = np.empty((samples, space.dim))
    for i in range(samples):
        r = rngmod.stream(base, i)
        g = guess_ball(X, space, r)
        radius = 2 * g.r_estimate ** (1 / space.p)
        out[i] = norm_ball_sample(space, g.y, radius, r)
    return Selection(out, nominal_count=ball_sample_count(n, epsilon, space.q, space.dim, space.p))


def kmeanspp_seed(X, space: PointSpace, t: int, rng, initial=(), return_costs: bool = False):
    """k-means++ style seeding: ``t`` single draws with ``Pr[x] ~ Delta(x, C)``.

    The first draw is uniform when ``initial`` is empty; any draw made while
    the current cost is zero is uniform as well.
    """
    cache = build_cache(space, X, initial)
    X = cache.points
    n = len(X)
    if n == 0:
        raise ValueError("kmeanspp_seed needs a nonempty X")
    costs = []
    chosen = []
    for _ in range(t):
        total = cache.total_cost
        if not cache.has_centers or total <= 0:
            i = int(rng.integers(0, n))
        else:
            i = int(rng.choice(n, p=cache.nearest_dist / total))
        chosen.append(i)
        cache = add_center(cache, X[i])
        costs.append(cache.total_cost)
    centers = X[np.asarray(chosen, dtype=np.intp)]
    if return_costs:
        return centers, costs
    return centers


def make_selector(spec: SelectorSpec, space: PointSpace, X) -> Callable[[NearestCache, np.random.Generator], Selection]:
    """Bind a spec to a dataset, returning ``select(cache, rng) -> Selection``."""
    kind = spec.kind
    if kind == "select_all":
        return lambda cache, rng: Selection(select_all(cache.points), nominal_count=len(cache.points))
    if kind == "select_pp":
        return lambda cache, rng: select_pp(cache.points, cache, spec, rng)
    if kind == "select_uniform":
        return lambda cache, rng: select_uniform(cache.points, spec, rng)
    if kind == "subset_means":
        if not space.is_kmeans:
            raise UnsupportedSpaceError("subset_means needs a k-means space")
        fixed = subset_means(space.as_points(X), spec.epsilon)
        return lambda cache, rng: Selection(fixed, nominal_count=len(fixed))
    if kind == "select_sgd":
        _require_euclidean_median(space)
        return lambda cache, rng: select_sgd(cache.points, space, spec.epsilon, spec.samples, rng, spec.step_scale)
    if kind == "select_ball":
        if space.kind != EUCLIDEAN:
            raise UnsupportedSpaceError("select_ball needs a euclidean space")
        return lambda cache, rng: select_ball(cache.points, space, spec.epsilon, spec.samples, rng)
    raise ValueError(kind)
