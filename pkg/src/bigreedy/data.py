"""Dataset ingestion (CSV), planted Gaussian mixtures and reference-solution files."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .diagnostics import ReferenceSolution, mean_fixed_point
from .exceptions import ParseError
from .metric import PointSpace, validate_finite_metric

FORMATS = ("points_csv", "metric_csv")
SPACE_KINDS = ("kmeans", "l2", "l1", "linf", "metric")


@dataclass
class Dataset:
    format: str
    points: np.ndarray  # (n, d) floats, or the index range for a metric
    dist: np.ndarray | None = None

    @property
    def dim(self) -> int | None:
        return None if self.dist is not None else self.points.shape[1]

    def space(self, kind: str = "kmeans", p: float = 1.0) -> PointSpace:
        return make_space(kind, p, dim=self.dim, dist=self.dist)


def make_space(kind: str, p: float = 1.0, dim: int | None = None, dist=None) -> PointSpace:
    if kind not in SPACE_KINDS:
        raise ValueError(f"unknown space {kind!r}; expected one of {SPACE_KINDS}")
    if kind == "metric":
        if dist is None:
            raise ValueError("a metric space needs a metric_csv dataset")
        return PointSpace.finite(dist, p=p)
    if dist is not None:
        raise ValueError(f"space {kind!r} needs a points_csv dataset")
    if kind == "kmeans":
        return PointSpace.kmeans(dim)
    return PointSpace.euclidean(dim, norm=kind, p=p)


def _read_rows(path: Path):
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            yield lineno, row


def _floats(path, lineno, row):
    try:
        return [float(cell) for cell in row]
    except ValueError:
        raise ParseError(path, lineno, f"non-numeric value in row {row!r}") from None


def load_points_csv(path) -> np.ndarray:
    """One point per row; a non-numeric first row is treated as a header."""
    path = Path(path)
    rows = []
    width = None
    for lineno, row in _read_rows(path):
        if not rows and width is None:
            try:
                vals = [float(cell) for cell in row]
            except ValueError:
                width = len(row)  # header
                continue
        else:
            vals = _floats(path, lineno, row)
        if width is None:
            width = len(vals)
        if len(vals) != width:
            raise ParseError(path, lineno, f"expected {width} columns, found {len(vals)}")
        rows.append(vals)
    if not rows:
        raise ParseError(path, 0, "no data rows")
    return np.asarray(rows, dtype=float)


def load_metric_csv(path) -> np.ndarray:
    path = Path(path)
    rows = []
    for lineno, row in _read_rows(path):
        vals = _floats(path, lineno, row)
        if rows and len(vals) != len(rows[0]):
            raise ParseError(path, lineno, f"expected {len(rows[0])} columns, found {len(vals)}")
        rows.append(vals)
    if not rows:
        raise ParseError(path, 0, "no data rows")
    if len(rows) != len(rows[0]):
        raise ParseError(path, len(rows), f"metric must be square, got {len(rows)}x{len(rows[0])}")
    return np.asarray(rows, dtype=float)


class InvalidMetricError(ValueError):
    def __init__(self, report):
        lines = report.lines()
        more = f" (+{len(lines) - 5} more)" if len(lines) > 5 else ""
        super().__init__("invalid metric: " + "; ".join(lines[:5]) + more)
        self.report = report


def load_dataset(path, format: str = "points_csv", allow_invalid_metric: bool = False) -> Dataset:
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if format == "points_csv":
        return Dataset(format, load_points_csv(path))
    dist = load_metric_csv(path)
    report = validate_finite_metric(dist)
    if not report.ok and not allow_invalid_metric:
        raise InvalidMetricError(report)
    return Dataset(format, np.arange(len(dist), dtype=np.intp), dist)


def write_points_csv(path, X: np.ndarray):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in X:
            w.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class MixtureSpec:
    k: int
    n_per_cluster: int
    dim: int
    center_box: float = 10.0
    spread: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.n_per_cluster < 1 or self.dim < 1:
            raise ValueError("k, n_per_cluster and dim must be positive")
        if not self.spread > 0:
            raise ValueError("spread must be positive")


def gen_mixture(spec: MixtureSpec, space: PointSpace | None = None):
    """Isotropic Gaussian blobs around centers drawn uniformly from the box.

    Returns ``(points, reference, labels)``.  For k-means the reference centers
    start at the empirical cluster means and are moved to the nearest mean
    fixed point, so each center is exactly the mean of its induced cluster.
    Otherwise the planted generators are the reference centers.
    """
    space = space or PointSpace.kmeans(spec.dim)
    r = rngmod.stream(spec.seed, rngmod.name_key("mixture"))
    centers = r.uniform(-spec.center_box, spec.center_box, size=(spec.k, spec.dim))
    noise = r.standard_normal((spec.k, spec.n_per_cluster, spec.dim)) * spec.spread
    X = (centers[:, None, :] + noise).reshape(-1, spec.dim)
    labels = np.repeat(np.arange(spec.k), spec.n_per_cluster)
    if space.is_kmeans:
        means = np.stack([X[labels == j].sum(axis=0) / spec.n_per_cluster for j in range(spec.k)])
        ref = ReferenceSolution.from_centers(space, X, mean_fixed_point(space, X, means), means_required=True)
    else:
        ref = ReferenceSolution.from_centers(space, X, centers)
    return X, ref, labels


# -- reference files -------------------------------------------------------------


def write_reference(path, space: PointSpace, ref: ReferenceSolution, dataset: str, format: str = "points_csv", extra=None):
    doc = {
        "schema": 1,
        "dataset": dataset,
        "format": format,
        "space": space.describe(),
        "centers": [space.point_key(c) for c in ref.centers],
        "means_required": ref.means_required,
        "cost": ref.cost,
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_reference(path):
    """Load a reference file and its dataset; returns ``(space, X, ref, doc)``."""
    path = Path(path)
    doc = json.loads(path.read_text())
    ds_path = Path(doc["dataset"])
    if not ds_path.is_absolute():
        ds_path = path.parent / ds_path
    ds = load_dataset(ds_path, doc.get("format", "points_csv"))
    sp = doc["space"]
    space = ds.space(sp["kind"], sp.get("p", 1.0))
    ref = ReferenceSolution.from_centers(space, ds.points, doc["centers"], doc.get("means_required", False))
    return space, ds.points, ref, doc


def mixture_dict(spec: MixtureSpec) -> dict:
    return asdict(spec)
