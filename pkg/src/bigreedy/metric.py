"""Point spaces, the base distance ``D`` and the cost kernel ``D**p``.

Two kinds of space are supported:

* Euclidean ``R^d`` under the l2, l1 or linf norm.  Points are float vectors
  and a set of points is an ``(n, d)`` array.
* A finite metric on ``{0, ..., n-1}`` given by an explicit distance matrix.
  Points are integer indices and a set of points is an integer array.

k-means is the Euclidean l2 space with ``p = 2`` and normalization exponent
``q = 1``; every other space uses ``q = p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidPointError, UnsupportedSpaceError

EUCLIDEAN = "euclidean"
FINITE_METRIC = "finite_metric"
NORMS = ("l2", "l1", "linf")

# relative slack for float comparisons of costs
REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PointSpace:
    kind: str
    p: float = 1.0
    dim: int | None = None
    norm: str = "l2"
    dist: np.ndarray | None = field(default=None, repr=False)
    is_kmeans: bool = False

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, FINITE_METRIC):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not (self.p >= 1):
            raise ValueError(f"exponent p must be >= 1, got {self.p}")
        if self.kind == EUCLIDEAN:
            if self.dim is None or self.dim < 1:
                raise ValueError("euclidean space needs a positive dim")
            if self.norm not in NORMS:
                raise ValueError(f"unknown norm {self.norm!r}")
            if self.is_kmeans and (self.norm != "l2" or self.p != 2):
                raise ValueError("k-means requires the l2 norm with p = 2")
        else:
            if self.is_kmeans:
                raise ValueError("k-means is only defined on euclidean l2")
            d = np.asarray(self.dist, dtype=float)
            if d.ndim != 2 or d.shape[0] != d.shape[1]:
                raise ValueError(f"distance matrix must be square, got {d.shape}")
            d.setflags(write=False)
            object.__setattr__(self, "dist", d)

    @classmethod
    def kmeans(cls, dim: int) -> "PointSpace":
        return cls(EUCLIDEAN, p=2.0, dim=dim, norm="l2", is_kmeans=True)

    @classmethod
    def euclidean(cls, dim: int, norm: str = "l2", p: float = 1.0) -> "PointSpace":
        return cls(EUCLIDEAN, p=float(p), dim=dim, norm=norm)

    @classmethod
    def finite(cls, dist, p: float = 1.0) -> "PointSpace":
        return cls(FINITE_METRIC, p=float(p), dist=dist)

    @property
    def q(self) -> float:
        return 1.0 if self.is_kmeans else self.p

    @property
    def is_euclidean(self) -> bool:
        return self.kind == EUCLIDEAN

    @property
    def n(self) -> int:
        """Number of points of a finite metric."""
        if self.kind != FINITE_METRIC:
            raise UnsupportedSpaceError("only finite metrics have a point count")
        return self.dist.shape[0]

    def describe(self) -> dict:
        if self.is_kmeans:
            return {"kind": "kmeans", "dim": self.dim}
        if self.kind == EUCLIDEAN:
            return {"kind": self.norm, "dim": self.dim, "p": self.p}
        return {"kind": "metric", "n": self.n, "p": self.p}

    # -- point validation ---------------------------------------------------

    def as_points(self, X) -> np.ndarray:
        """Validate a set of points, returning ``(n, d)`` floats or ``(n,)`` ints."""
        if self.kind == EUCLIDEAN:
            arr = np.asarray(X, dtype=float)
            if arr.size == 0:
                return arr.reshape(0, self.dim)
            if arr.ndim == 1 and self.dim == 1:
                arr = arr.reshape(-1, 1)
            if arr.ndim != 2 or arr.shape[1] != self.dim:
                raise InvalidPointError(
                    f"expected points of dimension {self.dim}, got shape {arr.shape}"
                )
            return arr
        arr = np.asarray(X)
        if arr.size == 0:
            return arr.astype(np.intp).reshape(0)
        if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
            raise InvalidPointError("finite-metric points are integer indices")
        if arr.min() < 0 or arr.max() >= self.n:
            raise InvalidPointError(f"point index out of range [0, {self.n})")
        return arr.astype(np.intp)

    def as_point(self, a):
        if self.kind == EUCLIDEAN:
            arr = np.asarray(a, dtype=float).reshape(-1)
            if arr.shape != (self.dim,):
                raise InvalidPointError(
                    f"expected a point of dimension {self.dim}, got shape {arr.shape}"
                )
            return arr
        if isinstance(a, (np.ndarray,)) and a.ndim == 0:
            a = a.item()
        if not isinstance(a, (int, np.integer)) or isinstance(a, bool):
            raise InvalidPointError(f"finite-metric point must be an index, got {a!r}")
        if not 0 <= a < self.n:
            raise InvalidPointError(f"point index {a} out of range [0, {self.n})")
        return int(a)

    # -- kernels --------------------------------------------------------------

    def _norm_last(self, diff: np.ndarray) -> np.ndarray:
        if self.norm == "l2":
            return np.sqrt(np.sum(diff * diff, axis=-1))
        if self.norm == "l1":
            return np.sum(np.abs(diff), axis=-1)
        return np.max(np.abs(diff), axis=-1)

    def _delta_from_diff(self, diff: np.ndarray) -> np.ndarray:
        if self.is_kmeans:
            return np.sum(diff * diff, axis=-1)
        base = self._norm_last(diff)
        return base if self.p == 1 else base**self.p

    def dist_to(self, X: np.ndarray, c) -> np.ndarray:
        """``D(x, c)`` for every row/index ``x`` of ``X``."""
        if self.kind == EUCLIDEAN:
            return self._norm_last(X - c)
        return self.dist[X, c]

    def delta_to(self, X: np.ndarray, c) -> np.ndarray:
        """``Delta(x, c)`` for every row/index ``x`` of ``X``."""
        if self.kind == EUCLIDEAN:
            return self._delta_from_diff(X - c)
        base = self.dist[X, c]
        return base if self.p == 1 else base**self.p

    def pairwise_delta(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """``(len(X), len(Y))`` matrix of ``Delta`` values."""
        if self.kind == EUCLIDEAN:
            return self._delta_from_diff(X[:, None, :] - Y[None, :, :])
        base = self.dist[np.ix_(X, Y)]
        return base if self.p == 1 else base**self.p

    def mean(self, A: np.ndarray) -> np.ndarray:
        if self.kind != EUCLIDEAN:
            raise UnsupportedSpaceError("means need a euclidean space")
        return A.sum(axis=0) / len(A)

    def point_key(self, c):
        """JSON-friendly form of a single point."""
        if self.kind == EUCLIDEAN:
            return [float(v) for v in c]
        return int(c)


def distance(space: PointSpace, a, b) -> float:
    a = space.as_point(a)
    b = space.as_point(b)
    if space.kind == EUCLIDEAN:
        return float(space._norm_last(a - b))
    return float(space.dist[a, b])


def delta(space: PointSpace, a, b) -> float:
    a = space.as_point(a)
    b = space.as_point(b)
    if space.kind == EUCLIDEAN:
        return float(space._delta_from_diff(a - b))
    base = float(space.dist[a, b])
    return base if space.p == 1 else base**space.p


@dataclass
class ValidationReport:
    symmetry: list = field(default_factory=list)  # (i, j) with i < j
    diagonal: list = field(default_factory=list)  # i
    negative: list = field(default_factory=list)  # (i, j)
    triangle: list = field(default_factory=list)  # (x, z, via)

    @property
    def ok(self) -> bool:
        return not (self.symmetry or self.diagonal or self.negative or self.triangle)

    def lines(self) -> list[str]:
        out = [f"symmetry violation at ({i},{j})" for i, j in self.symmetry]
        out += [f"nonzero diagonal at ({i},{i})" for i in self.diagonal]
        out += [f"negative entry at ({i},{j})" for i, j in self.negative]
        out += [f"triangle violation ({x},{z}) via {y}" for x, z, y in self.triangle]
        return out


def validate_finite_metric(dist, rel_tol: float = 1e-12) -> ValidationReport:
    """Check symmetry, zero diagonal, nonnegativity and the triangle inequality.

    The triangle check is O(n^3).
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    report = ValidationReport()
    n = d.shape[0]
    iu, ju = np.triu_indices(n, 1)
    bad = d[iu, ju] != d[ju, iu]
    report.symmetry = [(int(i), int(j)) for i, j in zip(iu[bad], ju[bad])]
    report.diagonal = [int(i) for i in np.flatnonzero(np.diag(d) != 0)]
    report.negative = [(int(i), int(j)) for i, j in zip(*np.nonzero(d < 0))]
    scale = float(np.max(np.abs(d))) if n else 0.0
    tol = rel_tol * scale
    for y in range(n):
        via = d[:, y][:, None] + d[y, :][None, :]
        xs, zs = np.nonzero(d > via + tol)
        report.triangle.extend(
            (int(x), int(z), y) for x, z in zip(xs, zs) if x != y and z != y
        )
    report.triangle.sort()
    return report


def norm_ball_sample(space: PointSpace, center, radius: float, rng: np.random.Generator):
    """Draw one point uniformly from ``{z : ||z - center|| <= radius}``."""
    if space.kind != EUCLIDEAN:
        raise UnsupportedSpaceError("ball sampling needs a euclidean space")
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    center = space.as_point(center)
    if radius == 0:
        return center.copy()
    d = space.dim
    if space.norm == "l2":
        g = rng.standard_normal(d)
        nrm = np.linalg.norm(g)
        while nrm == 0:
            g = rng.standard_normal(d)
            nrm = np.linalg.norm(g)
        return center + g / nrm * (radius * rng.random() ** (1.0 / d))
    if space.norm == "linf":
        return center + rng.uniform(-radius, radius, size=d)
    # l1
    if math.factorial(d) <= _L1_REJECTION_MAX_FACTORIAL:
        # cube acceptance rate is 1/d!
        batch = max(16, 2 * math.factorial(d))
        while True:
            u = rng.uniform(-1.0, 1.0, size=(batch, d))
            hit = np.flatnonzero(np.abs(u).sum(axis=1) <= 1.0)
            if hit.size:
                return center + radius * u[hit[0]]
    # exact construction: signed exponentials normalized by an extra spacing
    e = rng.standard_exponential(d + 1)
    signs = rng.choice((-1.0, 1.0), size=d)
    return center + radius * signs * e[:d] / e.sum()


_L1_REJECTION_MAX_FACTORIAL = math.factorial(6)
