"""The greedy loop: each round asks a selector for candidates and adds the
(1 + tau)-best one."""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .cost import NearestCache, add_center, build_cache, candidate_costs, _empty_centers
from .exceptions import EmptyCandidatesError, FingerprintMismatchError, SelectorError
from .metric import EUCLIDEAN, PointSpace
from .selectors import SelectorSpec, make_selector


@dataclass
class GreedyConfig:
    t: int
    selector: SelectorSpec
    tau: float = 0.0
    initial_centers: object = ()
    seed: int = 0
    threads: int = 1
    keep_candidates: bool = False

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be >= 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")


@dataclass
class RoundRecord:
    round: int
    center: object  # None on skipped rounds
    cost: float
    candidates: int
    skipped: bool = False
    rng_fingerprint: int = 0
    zero_cost: bool = False
    nominal_count: float | None = None
    candidate_set: np.ndarray | None = None
    certificate: dict | None = None


@dataclass
class GreedyTrace:
    initial_centers: np.ndarray
    initial_cost: float
    centers: np.ndarray
    rounds: list[RoundRecord] = field(default_factory=list)
    data_fingerprint: str = ""
    selector: dict = field(default_factory=dict)
    seed: int = 0
    tau: float = 0.0

    @property
    def costs(self) -> list[float]:
        return [r.cost for r in self.rounds]

    @property
    def final_cost(self) -> float:
        return self.rounds[-1].cost if self.rounds else self.initial_cost

    def records(self, space: PointSpace) -> list[dict]:
        head = {
            "round": 0,
            "cost": _num(self.initial_cost),
            "centers": [space.point_key(c) for c in self.initial_centers],
            "data_fingerprint": self.data_fingerprint,
            "selector": self.selector,
            "seed": self.seed,
            "tau": self.tau,
        }
        out = [head]
        for r in self.rounds:
            rec = {
                "round": r.round,
                "cost": _num(r.cost),
                "center": None if r.center is None else space.point_key(r.center),
                "candidates": r.candidates,
                "skipped": r.skipped,
                "rng": f"{r.rng_fingerprint:016x}",
            }
            if r.zero_cost:
                rec["zero_cost"] = True
            if r.candidate_set is not None:
                rec["candidate_set"] = [space.point_key(c) for c in r.candidate_set]
            if r.certificate is not None:
                rec["certificate"] = r.certificate
            out.append(rec)
        return out

    def to_jsonl(self, space: PointSpace) -> str:
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.records(space))

    def fingerprint(self, space: PointSpace) -> str:
        return hashlib.sha256(self.to_jsonl(space).encode()).hexdigest()[:16]

    @classmethod
    def from_jsonl(cls, text: str, space: PointSpace) -> "GreedyTrace":
        lines = [json.loads(s) for s in text.splitlines() if s.strip()]
        if not lines or lines[0].get("round") != 0:
            raise ValueError("trace must start with a round-0 header record")
        head = lines[0]
        init = _points(space, head["centers"])
        rounds = []
        centers = list(init)
        for rec in lines[1:]:
            c = None if rec["center"] is None else _points(space, [rec["center"]])[0]
            cand = rec.get("candidate_set")
            rounds.append(
                RoundRecord(
                    round=rec["round"],
                    center=c,
                    cost=_unnum(rec["cost"]),
                    candidates=rec["candidates"],
                    skipped=rec["skipped"],
                    rng_fingerprint=int(rec.get("rng", "0"), 16),
                    zero_cost=rec.get("zero_cost", False),
                    candidate_set=None if cand is None else _points(space, cand),
                    certificate=rec.get("certificate"),
                )
            )
            if c is not None:
                centers.append(c)
        return cls(
            initial_centers=init,
            initial_cost=_unnum(head["cost"]),
            centers=_points(space, centers),
            rounds=rounds,
            data_fingerprint=head.get("data_fingerprint", ""),
            selector=head.get("selector", {}),
            seed=head.get("seed", 0),
            tau=head.get("tau", 0.0),
        )


def _num(x: float):
    return None if math.isinf(x) else float(x)


def _unnum(x):
    return math.inf if x is None else float(x)


def _points(space: PointSpace, items) -> np.ndarray:
    if not len(items):
        return _empty_centers(space)
    if space.kind == EUCLIDEAN:
        return np.asarray(items, dtype=float).reshape(len(items), space.dim)
    return np.asarray(items, dtype=np.intp)


def data_fingerprint(X: np.ndarray) -> str:
    X = np.ascontiguousarray(X)
    h = hashlib.sha256(str(X.shape).encode() + str(X.dtype).encode())
    h.update(X.tobytes())
    return h.hexdigest()[:16]


def _pick_index(costs: np.ndarray, tau: float) -> int:
    best = costs.min()
    if tau == 0:
        return int(np.argmin(costs))
    return int(np.flatnonzero(costs <= (1 + tau) * best)[0])


def pick_candidate(cache: NearestCache, Y, tau: float = 0.0, rng=None, threads: int = 1):
    """Lowest-index candidate whose cost is within ``1 + tau`` of the best in ``Y``."""
    if len(Y) == 0:
        raise EmptyCandidatesError("no candidates to pick from")
    costs = candidate_costs(cache, Y, threads=threads)
    return cache.space.as_points(Y)[_pick_index(costs, tau)]


def run_greedy(space: PointSpace, X, config: GreedyConfig, selector=None) -> GreedyTrace:
    """Run ``config.t`` greedy rounds from ``config.initial_centers``.

    ``selector`` may be passed pre-bound (``make_selector``) to share one-off
    setup such as the subset-means set across runs.
    """
    X = space.as_points(X)
    if len(X) == 0:
        raise ValueError("run_greedy needs a nonempty X")
    select = selector or make_selector(config.selector, space, X)
    cache = build_cache(space, X, config.initial_centers)
    trace = GreedyTrace(
        initial_centers=cache.centers,
        initial_cost=cache.total_cost,
        centers=cache.centers,
        data_fingerprint=data_fingerprint(X),
        selector=config.selector.to_dict(),
        seed=int(config.seed),
        tau=float(config.tau),
    )
    for i in range(1, config.t + 1):
        r = rngmod.stream(config.seed, i)
        fp = rngmod.fingerprint(config.seed, i)
        try:
            sel = select(cache, r)
        except Exception as exc:
            raise SelectorError(i, exc) from exc
        Y = sel.points
        if len(Y) == 0:
            warnings.warn(f"round {i}: selector returned no candidates; round skipped", stacklevel=2)
            trace.rounds.append(RoundRecord(i, None, cache.total_cost, 0, True, fp, sel.zero_cost, sel.nominal_count))
            continue
        costs = candidate_costs(cache, Y, threads=config.threads)
        j = _pick_index(costs, config.tau)
        c = space.as_points(Y)[j]
        cache = add_center(cache, c)
        trace.rounds.append(
            RoundRecord(
                round=i,
                center=c,
                cost=cache.total_cost,
                candidates=len(Y),
                rng_fingerprint=fp,
                zero_cost=sel.zero_cost,
                nominal_count=sel.nominal_count,
                candidate_set=np.array(Y, copy=True) if config.keep_candidates else None,
            )
        )
    trace.centers = cache.centers
    return trace


def replay_candidates(space: PointSpace, X, trace: GreedyTrace) -> list[np.ndarray]:
    """Regenerate each round's candidate set from the trace's selector and seed.

    Rounds whose candidate sets were stored are returned as stored.
    """
    X = space.as_points(X)
    if trace.data_fingerprint and trace.data_fingerprint != data_fingerprint(X):
        raise FingerprintMismatchError("trace was produced on different data")
    spec = SelectorSpec(**trace.selector)
    select = None
    cache = build_cache(space, X, trace.initial_centers)
    out = []
    for rec in trace.rounds:
        if rec.candidate_set is not None:
            out.append(rec.candidate_set)
        else:
            if select is None:
                select = make_selector(spec, space, X)
            out.append(space.as_points(select(cache, rngmod.stream(trace.seed, rec.round)).points))
        if rec.center is not None:
            cache = add_center(cache, rec.center)
    return out
