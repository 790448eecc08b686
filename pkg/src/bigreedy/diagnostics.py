"""Data-dependent constants and per-round certificates against a reference solution.

Every inequality certificate uses a relative slack of ``REL_TOL`` measured
against the larger side of the comparison.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .cost import add_center, assign, build_cache
from .exceptions import DegenerateReferenceError, EmptyClusterError, FingerprintMismatchError
from .greedy import GreedyTrace, data_fingerprint, replay_candidates
from .metric import REL_TOL, PointSpace, delta


@dataclass
class ReferenceSolution:
    points: np.ndarray
    centers: np.ndarray
    partition: list[list[int]]
    cost: float
    means_required: bool = False

    @property
    def k(self) -> int:
        return len(self.centers)

    @classmethod
    def from_centers(cls, space: PointSpace, X, centers, means_required: bool = False) -> "ReferenceSolution":
        X = space.as_points(X)
        centers = space.as_points(centers)
        partition = assign(space, X, centers)
        cost = build_cache(space, X, centers).total_cost
        ref = cls(X, centers, partition, cost, means_required)
        if means_required:
            for j, part in enumerate(partition):
                if part:
                    mu = space.mean(X[part])
                    if not np.allclose(centers[j], mu, rtol=REL_TOL, atol=REL_TOL * (1 + np.abs(mu).max())):
                        raise DegenerateReferenceError(f"center {j} is not the mean of its cluster")
        return ref

    def cluster(self, j: int) -> np.ndarray:
        return self.points[self.partition[j]]

    def nonempty(self) -> list[int]:
        return [j for j, part in enumerate(self.partition) if part]

    def cluster_costs(self, space: PointSpace) -> np.ndarray:
        """``phi_{A_j}({c_j})`` per cluster."""
        return np.array(
            [float(space.delta_to(self.cluster(j), self.centers[j]).sum()) if self.partition[j] else 0.0 for j in range(self.k)]
        )


def mean_fixed_point(space: PointSpace, X, centers, max_iter: int = 200) -> np.ndarray:
    """Move centers to their cluster means until the induced partition is stable.

    Used to turn planted k-means centers into a reference whose centers are
    exactly the means of their own clusters.  Empty clusters keep their center.
    """
    X = space.as_points(X)
    centers = np.array(space.as_points(centers), dtype=float)
    partition = assign(space, X, centers)
    for _ in range(max_iter):
        for j, part in enumerate(partition):
            if part:
                centers[j] = space.mean(X[part])
        new = assign(space, X, centers)
        if new == partition:
            return centers
        partition = new
    raise RuntimeError("mean fixed point did not settle")


def _point_ratios(space: PointSpace, A: np.ndarray, c) -> np.ndarray:
    """``psi_{x}({c}) / psi_A({c})`` for each ``x`` in ``A`` (all zero for a zero-cost cluster)."""
    d = space.delta_to(A, c)
    total = float(d.sum())
    if total == 0:
        return np.zeros(len(A))
    inv_q = 1.0 / space.q
    return d**inv_q / (total / len(A)) ** inv_q


def kappa_lb(space: PointSpace, X, ref: ReferenceSolution) -> float:
    js = ref.nonempty()
    if not js:
        raise DegenerateReferenceError("reference has no nonempty cluster")
    return max(float(_point_ratios(space, ref.cluster(j), ref.centers[j]).min()) for j in js)


def core_set(space: PointSpace, A, c, kappa: float) -> np.ndarray:
    A = space.as_points(A)
    if len(A) == 0:
        raise EmptyClusterError("core of an empty cluster")
    return A[_point_ratios(space, A, c) <= kappa]


def core_need(size: int, epsilon: float) -> int:
    """Smallest integer count ``>= epsilon * size / (1 + epsilon)``."""
    return max(1, int(math.ceil(epsilon * size / (1 + epsilon) - 1e-9)))


def kappa_core(space: PointSpace, X, ref: ReferenceSolution, epsilon: float) -> float:
    js = ref.nonempty()
    if not js:
        raise DegenerateReferenceError("reference has no nonempty cluster")
    out = 0.0
    for j in js:
        r = np.sort(_point_ratios(space, ref.cluster(j), ref.centers[j]))
        out = max(out, float(r[core_need(len(r), epsilon) - 1]))
    return out


def _cluster_sums(ref: ReferenceSolution, per_point: np.ndarray) -> np.ndarray:
    """Sum a per-point array (or (n, m) matrix) over each reference cluster."""
    return np.stack([per_point[part].sum(axis=0) if part else np.zeros(per_point.shape[1:]) for part in ref.partition])


def min_single_costs(space: PointSpace, ref: ReferenceSolution, Y, chunk: int = 256) -> np.ndarray:
    """``min_{c in Y} phi_{A_j}({c})`` for every cluster ``j``."""
    Y = space.as_points(Y)
    best = np.full(ref.k, math.inf)
    for s in range(0, len(Y), chunk):
        D = space.pairwise_delta(ref.points, Y[s : s + chunk])
        best = np.minimum(best, _cluster_sums(ref, D).min(axis=1))
    return best


def condition1(space: PointSpace, ref: ReferenceSolution, Y, gamma: float) -> tuple[bool, float]:
    """Returns (holds, worst residual) where residual = lhs - rhs over clusters."""
    js = ref.nonempty()
    lhs = min_single_costs(space, ref, Y)[js]
    rhs = gamma * ref.cluster_costs(space)[js]
    slack = REL_TOL * np.maximum(lhs, rhs)
    resid = lhs - rhs
    return bool(np.all(resid <= slack)), float(resid.max())


def condition2(space: PointSpace, ref: ReferenceSolution, C_prev, Y, gamma: float) -> tuple[bool, float]:
    """Returns (holds, lhs - rhs).  With no previous centers both sides are infinite and it holds."""
    if len(C_prev) == 0:
        return True, 0.0
    cache = build_cache(space, ref.points, C_prev)
    prev = _cluster_sums(ref, cache.nearest_dist)
    single = min_single_costs(space, ref, Y)
    star = gamma * ref.cluster_costs(space)
    lhs = float(np.maximum(prev - single, 0).max())
    rhs = float(np.maximum(prev - star, 0).max())
    scale = float(max(prev.max(), star.max(), lhs, rhs))
    return lhs >= rhs - REL_TOL * scale, lhs - rhs


def check_condition1(space: PointSpace, ref: ReferenceSolution, Y, gamma: float) -> bool:
    return condition1(space, ref, Y, gamma)[0]


def check_condition2(space: PointSpace, ref: ReferenceSolution, C_prev, Y, gamma: float) -> bool:
    return condition2(space, ref, C_prev, Y, gamma)[0]


def check_triangle_power(space: PointSpace, A, c_star, y) -> bool:
    """``psi_A({y}) <= psi_A({c*}) + psi_{y}({c*})``."""
    A = space.as_points(A)
    if len(A) == 0:
        raise EmptyClusterError("empty cluster")
    inv_q = 1.0 / space.q
    lhs = (float(space.delta_to(A, y).sum()) / len(A)) ** inv_q
    rhs = (float(space.delta_to(A, c_star).sum()) / len(A)) ** inv_q
    rhs += delta(space, y, c_star) ** inv_q
    return lhs <= rhs + REL_TOL * max(lhs, rhs)


@dataclass
class RecurrenceReport:
    condition1_holds: list[bool] = field(default_factory=list)
    condition2_holds: list[bool] = field(default_factory=list)
    recurrence_satisfied: list[bool | None] = field(default_factory=list)  # None: not checked
    recurrence_residual: list[float | None] = field(default_factory=list)
    rho_empirical: float = 0.0
    gamma: float = 1.0
    tau: float = 0.0
    epsilon: float | None = None
    alpha_declared: float | None = None
    k: int = 0
    reference_cost: float = 0.0
    final_ratio: float = 0.0
    measured_alpha: float = math.inf
    kappa_lb: float | None = None
    kappa_core: float | None = None
    predicted_rounds: float | None = None
    first_round_below: int | None = None
    lemma_bound: float | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def implication_violations(self) -> int:
        return sum(1 for a, b in zip(self.condition1_holds, self.condition2_holds) if a and not b)

    @property
    def recurrence_violations(self) -> int:
        return sum(1 for r in self.recurrence_satisfied if r is False)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, float) and not math.isfinite(val):
                d[key] = None
        d["schema"] = 1
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _ratio(a: float, b: float) -> float:
    if b > 0:
        return a / b
    return 1.0 if a == 0 else math.inf


def audit_run(
    space: PointSpace,
    X,
    ref: ReferenceSolution,
    trace: GreedyTrace,
    gamma: float,
    tau: float | None = None,
    epsilon: float | None = None,
    alpha: float | None = None,
    candidate_sets=None,
) -> RecurrenceReport:
    """Certify conditions and the one-step recurrence on every round of ``trace``."""
    X = space.as_points(X)
    if trace.data_fingerprint and trace.data_fingerprint != data_fingerprint(X):
        raise FingerprintMismatchError("trace was produced on different data")
    if data_fingerprint(ref.points) != data_fingerprint(X):
        raise FingerprintMismatchError("reference was built on different data")
    tau = trace.tau if tau is None else tau
    k = ref.k
    opt = ref.cost
    rep = RecurrenceReport(gamma=gamma, tau=tau, epsilon=epsilon, alpha_declared=alpha, k=k, reference_cost=opt)
    if k > 1 and tau >= 1 / (k - 1):
        msg = f"tau={tau} is not below 1/(k-1); recurrence bounds assume it is"
        warnings.warn(msg, stacklevel=2)
        rep.warnings.append(msg)
    if candidate_sets is None:
        candidate_sets = replay_candidates(space, X, trace)
    cache = build_cache(space, X, trace.initial_centers)
    prev_cost = cache.total_cost
    for rec, Y in zip(trace.rounds, candidate_sets):
        if len(Y) == 0:
            c1 = c2 = False
        else:
            c1, r1 = condition1(space, ref, Y, gamma)
            c2, r2 = condition2(space, ref, cache.centers, Y, gamma)
            rec.certificate = {"condition1": c1, "condition2": c2, "residual1": r1, "residual2": r2}
        if rec.center is not None:
            cache = add_center(cache, rec.center)
        after = cache.total_cost
        ok = resid = None
        if c2 and math.isfinite(prev_cost):
            bound = (1 - 1 / k) * (1 + tau) * prev_cost + gamma / k * (1 + tau) * opt
            resid = after - bound
            ok = bool(resid <= REL_TOL * max(after, bound))
        rep.condition1_holds.append(c1)
        rep.condition2_holds.append(c2)
        rep.recurrence_satisfied.append(ok)
        rep.recurrence_residual.append(resid)
        prev_cost = after
    t = len(trace.rounds)
    rep.rho_empirical = sum(rep.condition2_holds) / t if t else 0.0
    rep.final_ratio = _ratio(trace.final_cost, opt)
    rep.measured_alpha = _ratio(trace.initial_cost, opt)
    try:
        rep.kappa_lb = kappa_lb(space, X, ref)
        if epsilon is not None:
            rep.kappa_core = kappa_core(space, X, ref, epsilon)
    except DegenerateReferenceError:
        pass
    if epsilon is not None:
        a = rep.measured_alpha if alpha is None else alpha
        if math.isfinite(a) and a > gamma:
            rep.predicted_rounds = k * math.log((a - gamma) / (gamma * epsilon))
        elif a <= gamma:
            rep.predicted_rounds = 0.0
        target = gamma * (1 + epsilon)
        curve = [trace.initial_cost] + trace.costs
        for i, c in enumerate(curve):
            if _ratio(c, opt) <= target * (1 + REL_TOL):
                rep.first_round_below = i
                break
        if rep.measured_alpha < gamma:
            rep.warnings.append("initial cost is already below gamma * reference cost")
        if not math.isfinite(rep.measured_alpha):
            rep.warnings.append("initial centers are empty; alpha is unbounded")
        elif alpha is not None and rep.measured_alpha > alpha * (1 + REL_TOL):
            rep.warnings.append(f"measured alpha {rep.measured_alpha:.6g} exceeds declared alpha {alpha}")
    s = sum(rep.condition2_holds)
    if math.isfinite(trace.initial_cost) and (k == 1 or tau < 1 / (k - 1)):
        shrink = ((1 - 1 / k) * (1 + tau)) ** s
        rep.lemma_bound = shrink * trace.initial_cost + (1 - shrink) * gamma * (1 + tau) / (1 - (k - 1) * tau) * opt
    return rep
