"""Experiment orchestration: repeated greedy / k-means++ runs, aggregates and outputs."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .config import AlgorithmSpec, ExperimentConfig
from .cost import build_cache, distinct_count
from .data import gen_mixture, load_dataset, load_metric_csv, load_points_csv, make_space
from .greedy import GreedyConfig, data_fingerprint, run_greedy
from .metric import PointSpace
from .selectors import kmeanspp_seed, make_selector

log = logging.getLogger(__name__)

SCHEMA = 1


@dataclass
class RunRecord:
    algorithm: str
    repeat: int
    final_cost: float | None = None
    curve: list = field(default_factory=list)  # [(centers, cost)]
    n_centers: int = 0
    distinct_centers: int = 0
    trace_fingerprint: str = ""
    wall_time: float = 0.0
    error: str | None = None
    trace_jsonl: str | None = None


@dataclass
class RunResult:
    config: dict
    dataset: dict
    runs: list[RunRecord]
    metrics: tuple

    @property
    def failures(self) -> int:
        return sum(1 for r in self.runs if r.error is not None)

    def algorithms(self) -> list[str]:
        seen = []
        for r in self.runs:
            if r.algorithm not in seen:
                seen.append(r.algorithm)
        return seen

    def final_costs(self, name: str) -> list[float]:
        return [r.final_cost for r in self.runs if r.algorithm == name and r.error is None]

    def aggregates(self) -> dict:
        out = {}
        for name in self.algorithms():
            vals = self.final_costs(name)
            agg = {"successes": len(vals), "failures": sum(1 for r in self.runs if r.algorithm == name and r.error)}
            if vals:
                agg["median_cost"] = statistics.median(vals)
                agg["min_cost"] = min(vals)
            out[name] = agg
        return out

    def ratios(self) -> dict:
        agg = self.aggregates()
        out = {}
        for a in self.algorithms():
            for b in self.algorithms():
                if a == b or "median_cost" not in agg[a] or "median_cost" not in agg[b]:
                    continue
                out[f"{a}/{b}"] = {
                    "median": _div(agg[a]["median_cost"], agg[b]["median_cost"]),
                    "min": _div(agg[a]["min_cost"], agg[b]["min_cost"]),
                }
        return out

    def to_dict(self) -> dict:
        runs = []
        for r in self.runs:
            rec = {
                "algorithm": r.algorithm,
                "repeat": r.repeat,
                "final_cost": r.final_cost,
                "centers": r.n_centers,
                "distinct_centers": r.distinct_centers,
                "trace_fingerprint": r.trace_fingerprint,
                "error": r.error,
            }
            if "cost_curve" in self.metrics:
                rec["curve"] = [[c, v] for c, v in r.curve]
            runs.append(rec)
        aggs = self.aggregates()
        for agg in aggs.values():
            if "median_cost" not in self.metrics:
                agg.pop("median_cost", None)
            if "min_cost" not in self.metrics:
                agg.pop("min_cost", None)
        doc = {"schema": SCHEMA, "config": self.config, "dataset": self.dataset, "runs": runs, "aggregates": aggs}
        if "ratios" in self.metrics:
            doc["ratios"] = self.ratios()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def curve_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm", "repeat", "centers", "cost"])
        for r in self.runs:
            for c, v in r.curve:
                w.writerow([r.algorithm, r.repeat, c, repr(v)])
        return buf.getvalue()

    def timing(self) -> dict:
        return {f"{r.algorithm}/{r.repeat}": r.wall_time for r in self.runs}


def _div(a: float, b: float) -> float | None:
    return a / b if b else None


def prepare_data(config: ExperimentConfig):
    """Return ``(space, X, dataset_info)`` for the config's dataset."""
    if config.dataset == "mixture":
        spec = config.mixture
        probe = make_space(config.space, config.p, dim=spec.dim)
        X, ref, _ = gen_mixture(spec, probe)
        info = {"kind": "mixture", "n": len(X), "dim": spec.dim, "reference_cost": ref.cost}
        space = probe
    else:
        path = Path(config.dataset)
        if not path.is_absolute():
            path = config.base_dir / path
        ds = load_dataset(path, config.format)
        space = ds.space(config.space, config.p)
        X = ds.points
        info = {"kind": config.format, "path": str(config.dataset), "n": len(X), "dim": ds.dim}
    info["fingerprint"] = data_fingerprint(X)
    return space, X, info


def _initial_centers(space: PointSpace, X, algo: AlgorithmSpec, config: ExperimentConfig, keys):
    """Initial centers plus the cost curve they produce."""
    if algo.init == "empty":
        return X[:0], []
    if algo.init.startswith("kmeanspp:"):
        j = algo.init_count
        centers, costs = kmeanspp_seed(X, space, j, rngmod.stream(*keys, 1), return_costs=True)
        return centers, [(i + 1, c) for i, c in enumerate(costs)]
    path = Path(algo.init.split(":", 1)[1])
    if not path.is_absolute():
        path = config.base_dir / path
    if space.is_euclidean:
        C = load_points_csv(path)
    else:
        C = load_metric_csv(path).astype(np.intp).reshape(-1)
    C = space.as_points(C)
    return C, [(len(C), build_cache(space, X, C).total_cost)]


def run_one(space: PointSpace, X, algo: AlgorithmSpec, repeat: int, config: ExperimentConfig, selector=None, keep_trace=False) -> RunRecord:
    keys = (config.seed, rngmod.name_key(algo.name), repeat)
    rec = RunRecord(algo.name, repeat)
    start = time.perf_counter()
    try:
        if algo.kind == "kmeanspp":
            centers, costs = kmeanspp_seed(X, space, algo.t, rngmod.stream(*keys, 0), return_costs=True)
            rec.curve = [(i + 1, c) for i, c in enumerate(costs)]
            blob = json.dumps({"centers": [space.point_key(c) for c in centers], "curve": rec.curve})
            rec.trace_fingerprint = hashlib.sha256(blob.encode()).hexdigest()[:16]
        else:
            C0, curve = _initial_centers(space, X, algo, config, keys)
            gcfg = GreedyConfig(
                t=algo.t, selector=algo.selector, tau=algo.tau, initial_centers=C0, seed=rngmod.fingerprint(*keys, 2)
            )
            trace = run_greedy(space, X, gcfg, selector=selector)
            base = len(C0)
            curve = list(curve)
            for r in trace.rounds:
                curve.append((base + r.round, r.cost))
            rec.curve = curve
            centers = trace.centers
            rec.trace_fingerprint = trace.fingerprint(space)
            if keep_trace:
                rec.trace_jsonl = trace.to_jsonl(space)
        rec.n_centers = len(centers)
        rec.distinct_centers = distinct_count(space, centers)
        rec.final_cost = rec.curve[-1][1] if rec.curve else None
        if rec.final_cost is not None and not np.isfinite(rec.final_cost):
            rec.final_cost = None
    except Exception as exc:  # recorded per run; aggregation proceeds
        log.exception("run %s/%d failed", algo.name, repeat)
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - start
    return rec


def run_experiment(config: ExperimentConfig, threads: int = 1, emit_traces: bool = False) -> RunResult:
    space, X, info = prepare_data(config)
    X = space.as_points(X)
    selectors = {}
    for algo in config.algorithms:
        # one-off candidate sets (subset means) are shared across repeats
        if algo.kind == "greedy" and algo.selector.kind == "subset_means":
            selectors[algo.name] = make_selector(algo.selector, space, X)
    jobs = [(algo, rep) for algo in config.algorithms for rep in range(config.repeats)]

    def work(job):
        algo, rep = job
        return run_one(space, X, algo, rep, config, selectors.get(algo.name), keep_trace=emit_traces)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(work, jobs))
    else:
        runs = [work(j) for j in jobs]
    return RunResult(config.to_dict(), info, runs, tuple(config.metrics))


def write_outputs(result: RunResult, out_dir, emit_traces: bool = False) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(result.to_json())
    (out / "curve.csv").write_text(result.curve_csv())
    (out / "timing.json").write_text(json.dumps(result.timing(), indent=2, sort_keys=True) + "\n")
    if emit_traces:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for r in result.runs:
            if r.trace_jsonl is not None:
                (tdir / f"{_safe(r.algorithm)}_{r.repeat}.jsonl").write_text(r.trace_jsonl)
    return out


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else f"x{ord(ch):02x}" for ch in name)
