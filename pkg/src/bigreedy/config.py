"""Flat ``key = value`` experiment configs.

Grammar (one entry per line)::

    line      := blank | comment | key "=" value [comment]
    comment   := "#" ...            (a "#" preceded by whitespace or at line start)
    key       := [A-Za-z0-9_.+-]+   (each key at most once)

Recognized keys:

    dataset          "mixture" or a CSV path (relative to the config file)
    format           points_csv | metric_csv               (CSV datasets)
    mixture.k, mixture.n_per_cluster, mixture.dim,
    mixture.center_box, mixture.spread, mixture.seed       (mixture datasets)
    space            kmeans | l2 | l1 | linf | metric      (default kmeans)
    p                exponent for non-kmeans spaces        (default 1)
    repeats          runs per algorithm                    (default 1)
    seed             base seed                             (default 0)
    metrics          comma list of median_cost, min_cost, cost_curve, ratios
    output           output directory
    algorithm.NAME   KIND [key=value ...]

An algorithm value starts with ``greedy`` or ``kmeanspp`` followed by
``key=value`` tokens: ``t``, ``tau``, ``init`` (``empty``, ``kmeanspp:J`` or
``provided:PATH``), ``select`` (``all``, ``pp``, ``uniform``, ``means``,
``sgd``, ``ball``) and the selector knobs ``epsilon``, ``k``, ``m``,
``samples``, ``step_scale``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .data import FORMATS, SPACE_KINDS, MixtureSpec
from .selectors import SelectorSpec

METRICS = ("median_cost", "min_cost", "cost_curve", "ratios")
SELECT_ALIASES = {
    "all": "select_all",
    "pp": "select_pp",
    "uniform": "select_uniform",
    "means": "subset_means",
    "sgd": "select_sgd",
    "ball": "select_ball",
}
_KEY = re.compile(r"^[A-Za-z0-9_.+\-]+$")


class ConfigError(ValueError):
    pass


@dataclass
class AlgorithmSpec:
    name: str
    kind: str  # greedy | kmeanspp
    t: int
    selector: SelectorSpec | None = None
    init: str = "empty"
    tau: float = 0.0

    def __post_init__(self):
        if self.kind not in ("greedy", "kmeanspp"):
            raise ConfigError(f"algorithm {self.name}: unknown kind {self.kind!r}")
        if self.t < 0:
            raise ConfigError(f"algorithm {self.name}: t must be >= 0")
        if self.kind == "greedy" and self.selector is None:
            raise ConfigError(f"algorithm {self.name}: greedy needs select=...")
        if not (self.init == "empty" or self.init.startswith(("kmeanspp:", "provided:"))):
            raise ConfigError(f"algorithm {self.name}: bad init {self.init!r}")

    @property
    def init_count(self) -> int:
        return int(self.init.split(":", 1)[1]) if self.init.startswith("kmeanspp:") else 0

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "t": self.t, "init": self.init, "tau": self.tau}
        if self.selector is not None:
            d["selector"] = self.selector.to_dict()
        return d


@dataclass
class ExperimentConfig:
    algorithms: list[AlgorithmSpec]
    dataset: str = "mixture"
    format: str = "points_csv"
    mixture: MixtureSpec | None = None
    space: str = "kmeans"
    p: float = 1.0
    repeats: int = 1
    seed: int = 0
    metrics: tuple = METRICS
    output: str | None = None
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ConfigError("algorithm names must be unique")
        if not self.algorithms:
            raise ConfigError("no algorithm.* entries")
        if self.space not in SPACE_KINDS:
            raise ConfigError(f"unknown space {self.space!r}")
        if self.dataset == "mixture" and self.mixture is None:
            raise ConfigError("mixture dataset needs mixture.* keys")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        bad = set(self.metrics) - set(METRICS)
        if bad:
            raise ConfigError(f"unknown metrics {sorted(bad)}")

    def to_dict(self) -> dict:
        d = {
            "dataset": self.dataset,
            "space": self.space,
            "p": self.p,
            "repeats": self.repeats,
            "seed": self.seed,
            "metrics": list(self.metrics),
            "algorithms": [a.to_dict() for a in self.algorithms],
        }
        if self.mixture is not None:
            d["mixture"] = self.mixture.__dict__.copy()
        else:
            d["format"] = self.format
        return d


def parse_pairs(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = re.split(r"(?:^|\s)#", raw, maxsplit=1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"{source}:{lineno}: bad key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _num(value: str, cast, what: str):
    try:
        return cast(value)
    except ValueError:
        raise ConfigError(f"{what}: expected {cast.__name__}, got {value!r}") from None


def parse_algorithm(name: str, value: str) -> AlgorithmSpec:
    tokens = value.split()
    if not tokens:
        raise ConfigError(f"algorithm {name}: empty definition")
    kind, opts = tokens[0], {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ConfigError(f"algorithm {name}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        opts[k] = v
    what = f"algorithm {name}"
    t = _num(opts.pop("t", "0"), int, what)
    tau = _num(opts.pop("tau", "0"), float, what)
    init = opts.pop("init", "empty")
    selector = None
    if "select" in opts:
        sel = opts.pop("select")
        if sel not in SELECT_ALIASES:
            raise ConfigError(f"{what}: unknown selector {sel!r}")
        kw = {}
        for key, cast in (("epsilon", float), ("k", int), ("m", int), ("samples", int), ("step_scale", float)):
            if key in opts:
                kw[key] = _num(opts.pop(key), cast, what)
        try:
            selector = SelectorSpec(SELECT_ALIASES[sel], **kw)
        except ValueError as exc:
            raise ConfigError(f"{what}: {exc}") from None
    if opts:
        raise ConfigError(f"{what}: unknown options {sorted(opts)}")
    return AlgorithmSpec(name, kind, t, selector, init, tau)


def parse_config(text: str, source: str = "<config>", base_dir=None) -> ExperimentConfig:
    pairs = parse_pairs(text, source)
    algos = [parse_algorithm(k.split(".", 1)[1], v) for k, v in pairs.items() if k.startswith("algorithm.")]
    mix_keys = {k.split(".", 1)[1]: v for k, v in pairs.items() if k.startswith("mixture.")}
    mixture = None
    if mix_keys:
        casts = {"k": int, "n_per_cluster": int, "dim": int, "center_box": float, "spread": float, "seed": int}
        unknown = set(mix_keys) - set(casts)
        if unknown:
            raise ConfigError(f"unknown mixture keys {sorted(unknown)}")
        try:
            mixture = MixtureSpec(**{k: _num(v, casts[k], f"mixture.{k}") for k, v in mix_keys.items()})
        except TypeError as exc:
            raise ConfigError(f"mixture: {exc}") from None
    known = {"dataset", "format", "space", "p", "repeats", "seed", "metrics", "output"}
    unknown = {k for k in pairs if k not in known and not k.startswith(("algorithm.", "mixture."))}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    metrics = tuple(m.strip() for m in pairs["metrics"].split(",") if m.strip()) if "metrics" in pairs else METRICS
    return ExperimentConfig(
        algorithms=algos,
        dataset=pairs.get("dataset", "mixture"),
        format=pairs.get("format", "points_csv"),
        mixture=mixture,
        space=pairs.get("space", "kmeans"),
        p=_num(pairs.get("p", "1"), float, "p"),
        repeats=_num(pairs.get("repeats", "1"), int, "repeats"),
        seed=_num(pairs.get("seed", "0"), int, "seed"),
        metrics=metrics,
        output=pairs.get("output"),
        base_dir=Path(base_dir) if base_dir is not None else Path(),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), str(path), base_dir=path.parent)
