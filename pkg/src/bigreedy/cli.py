"""Command line entry point: ``bigreedy {run,gen,oracle,audit,check-metric}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .data import (
    FORMATS,
    SPACE_KINDS,
    InvalidMetricError,
    MixtureSpec,
    gen_mixture,
    load_dataset,
    load_metric_csv,
    make_space,
    read_reference,
    write_points_csv,
    write_reference,
)
from .diagnostics import audit_run
from .exceptions import BigreedyError
from .greedy import GreedyTrace
from .harness import run_experiment, write_outputs
from .metric import validate_finite_metric
from .oracle import brute_force_kmeans, brute_force_medoids

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


def _global_flags(parser, defaults: bool):
    """Global flags; subcommand copies use SUPPRESS so they only override when given."""
    def dflt(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--seed", type=int, default=dflt(None), help="override the base seed")
    parser.add_argument("--threads", type=int, default=dflt(1), help="worker threads (default 1)")
    parser.add_argument("--output", default=dflt(None), help="output directory or file")
    parser.add_argument("--emit-traces", action="store_true", default=dflt(False), help="write per-run trace JSONL files")
    parser.add_argument("-v", "--verbose", action="store_true", default=dflt(False))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bigreedy", description="Greedy bi-criteria clustering experiments.")
    _global_flags(parser, defaults=True)
    common = _Parser(add_help=False)
    _global_flags(common, defaults=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="run an experiment config")
    p.add_argument("config")

    p = sub.add_parser("gen", parents=[common], help="write a planted Gaussian mixture")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-per-cluster", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--center-box", type=float, default=10.0)
    p.add_argument("--spread", type=float, default=1.0)
    p.add_argument("--space", choices=[s for s in SPACE_KINDS if s != "metric"], default="kmeans")
    p.add_argument("--p", type=float, default=1.0)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive optimum for a tiny dataset")
    p.add_argument("dataset")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--format", choices=FORMATS, default="points_csv")
    p.add_argument("--space", choices=SPACE_KINDS, default=None)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--means", action="store_true", help="unrestricted k-means optimum instead of medoids")

    p = sub.add_parser("audit", parents=[common], help="certify conditions on a recorded trace")
    p.add_argument("trace")
    p.add_argument("reference")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)

    p = sub.add_parser("check-metric", parents=[common], help="validate a distance-matrix CSV")
    p.add_argument("csv")
    return parser


def _cmd_run(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        print(f"bigreedy run: no such config: {path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(path)
    except ConfigError as exc:
        print(f"bigreedy run: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    result = run_experiment(config, threads=args.threads, emit_traces=args.emit_traces)
    out = args.output or config.output or "results"
    if args.output is None and config.output is not None and not Path(out).is_absolute():
        out = config.base_dir / out
    out = write_outputs(result, out, emit_traces=args.emit_traces)
    for name, ratio in result.ratios().items():
        print(f"{name}: median ratio {ratio['median']}, min ratio {ratio['min']}")
    print(f"wrote {out / 'result.json'}")
    if result.failures:
        print(f"{result.failures} run(s) failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_gen(args) -> int:
    spec = MixtureSpec(args.k, args.n_per_cluster, args.dim, args.center_box, args.spread, args.seed or 0)
    space = make_space(args.space, args.p, dim=args.dim)
    X, ref, _ = gen_mixture(spec, space)
    out = Path(args.output or "mixture")
    out.mkdir(parents=True, exist_ok=True)
    write_points_csv(out / "points.csv", X)
    write_reference(out / "reference.json", space, ref, "points.csv", extra={"mixture": dataclasses.asdict(spec)})
    print(f"wrote {len(X)} points to {out / 'points.csv'} (reference cost {ref.cost!r})")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    ds = load_dataset(args.dataset, args.format)
    kind = args.space or ("metric" if args.format == "metric_csv" else "kmeans")
    space = ds.space(kind, args.p)
    if args.means:
        parts, means, cost = brute_force_kmeans(space, ds.points, args.k)
        print(json.dumps({"cost": cost, "partition": parts, "centers": means.tolist()}))
    else:
        centers, cost, idx = brute_force_medoids(space, ds.points, args.k)
        print(json.dumps({"cost": cost, "indices": idx, "centers": [space.point_key(c) for c in centers]}))
    return EXIT_OK


def _cmd_audit(args) -> int:
    space, X, ref, _ = read_reference(args.reference)
    trace = GreedyTrace.from_jsonl(Path(args.trace).read_text(), space)
    rep = audit_run(space, X, ref, trace, args.gamma, tau=args.tau, epsilon=args.epsilon, alpha=args.alpha)
    text = rep.to_json() + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    bad = rep.implication_violations + rep.recurrence_violations
    if bad:
        print(f"{bad} violation(s)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_check_metric(args) -> int:
    report = validate_finite_metric(load_metric_csv(args.csv))
    if report.ok:
        print("valid")
        return EXIT_OK
    print("invalid")
    for line in report.lines():
        print(line)
    return EXIT_FAIL


COMMANDS = {"run": _cmd_run, "gen": _cmd_gen, "oracle": _cmd_oracle, "audit": _cmd_audit, "check-metric": _cmd_check_metric}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"bigreedy {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BigreedyError, InvalidMetricError, ValueError) as exc:
        print(f"bigreedy {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
