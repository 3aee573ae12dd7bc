from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Sequence

from .bench import FAMILIES, PLOT_FORMATS, ExperimentSpec, load_experiment_spec, replay, run_experiment
from .exceptions import InvalidInputError, UnsupportedFormatError
from .planner import PLANNER_MODES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURES = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Exits with EXIT_USAGE on bad arguments instead of argparse's 2, which means run failures here"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="pyinformed", description="RRT* and Informed RRT* benchmark experiments")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for planner detail")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    for family in FAMILIES:
        sub = commands.add_parser(family.replace("_", "-"), help=f"run the {family} experiment")
        sub.set_defaults(family=family)
        sub.add_argument("--config", help="flat YAML experiment file; flags override its values")
        sub.add_argument("--seed", type=int, dest="base_seed", help="seed of the first run")
        sub.add_argument("--runs", type=int, dest="runs_per_cell", help="runs per cell")
        sub.add_argument("--out", default=".", help="output directory (default: current directory)")
        sub.add_argument("--time-budget", type=float, dest="time_budget", help="seconds per planner run")
        sub.add_argument("--max-iter", type=int, dest="max_iterations", help="iterations per planner run")
        sub.add_argument("--workers", type=int, help="worker processes")
        sub.add_argument("--dimensions", type=int, nargs="+", help="state dimensions")
        sub.add_argument("--modes", nargs="+", choices=PLANNER_MODES, help="planner modes")
        sub.add_argument("--format", default="tsv", dest="fmt", help=f"plot output, one of {', '.join(PLOT_FORMATS)}")

    sub = commands.add_parser("replay", help="re-run one run of an earlier experiment")
    sub.add_argument("runs_csv", help="runs.csv of the experiment")
    sub.add_argument("run_id", type=int)
    return parser


OVERRIDES = ("base_seed", "runs_per_cell", "time_budget", "max_iterations", "workers", "dimensions", "modes")


def experiment_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config:
        spec = load_experiment_spec(args.config)
        if spec.family != args.family:
            raise InvalidInputError(f"{args.config} describes a {spec.family} experiment, not {args.family}")
    else:
        spec = ExperimentSpec(args.family)

    changes = {name: getattr(args, name) for name in OVERRIDES if getattr(args, name) is not None}
    if "time_budget" in changes and "max_iterations" not in changes and not args.config:
        changes["max_iterations"] = None
    return dataclasses.replace(spec, **changes)


def _run_family(args: argparse.Namespace) -> int:
    spec = experiment_from_args(args)
    result = run_experiment(spec, args.out, args.fmt)

    for row in result.summary:
        cell = " ".join(f"{k}={v}" for k, v in row.cell)
        flag = f" ({row.warning.replace('_', ' ')})" if row.warning else ""
        print(
            f"{cell}\t{row.planner}\t{row.metric_name}\t{row.median:.6g}\t[{row.ci_lo:.6g}, {row.ci_hi:.6g}]"
            f"\tn={row.n}\tfailures={row.failures}{flag}"
        )
    if result.failures:
        print(f"{result.failures} runs failed", file=sys.stderr)
        return EXIT_FAILURES
    return EXIT_OK


def _replay(args: argparse.Namespace) -> int:
    outcome = replay(args.runs_csv, args.run_id)
    record = outcome.record
    print(f"run {record.run_id}: {record.planner} seed={record.seed} cell={record.cell} world={record.world_hash}")
    for event in record.events:
        print(f"{event.iteration}\t{event.elapsed:.6f}\t{event.cost!r}")
    print(f"termination: {record.termination}, final cost {record.final_cost!r}, recorded {outcome.recorded_final_cost!r}")
    if not outcome.matches:
        print("replayed final cost differs from the recorded one", file=sys.stderr)
        return EXIT_FAILURES
    return EXIT_OK


def main(argv: Sequence[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")

    try:
        if args.command == "replay":
            return _replay(args)
        return _run_family(args)
    except (InvalidInputError, UnsupportedFormatError) as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
