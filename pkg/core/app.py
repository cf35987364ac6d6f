"""Command-line entrypoint: run, aggregate, report and oracle subcommands."""

from __future__ import annotations

import argparse
import json
import sys

from config import load_config, load_experiment_config

from .bench import aggregate_dir, format_oracle_rows, format_report, oracle_row, report, run_experiment
from .environments import build_scenario, scenario_names
from .errors import SspError
from .logging_setup import configure_optional_json_logging, log


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config()
    configure_optional_json_logging(config.output_root)
    exp = load_experiment_config(args.config, runtime=config)
    if args.output:
        exp.output_dir = args.output
    if args.workers:
        exp.workers = max(1, args.workers)

    log.info("ssplab experiment starting...")
    log.info(f"   Scenario: {exp.scenario} {exp.scenario_params or ''}".rstrip())
    log.info(f"   Algorithms: {', '.join(exp.algorithms)}")
    log.info(f"   Episodes: {exp.K:,} x {exp.repetitions} seed(s) from {exp.base_seed}")
    log.info(f"   Confidence: {exp.confidence_mode} (delta={exp.delta})")
    log.info(f"   Workers: {exp.workers}")
    log.info(f"   Output: {exp.output_dir}")

    run_dir = run_experiment(exp)
    log.info(f"Done: {run_dir}")
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    configure_optional_json_logging(load_config().output_root)
    series = aggregate_dir(args.dir)
    log.info(f"Aggregated {len(series)} algorithm(s) in {args.dir}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    configure_optional_json_logging(load_config().output_root)
    rows = report(args.dir, plot=args.plot, early_frac=args.early, late_frac=args.late)
    print(format_report(rows))
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    params = json.loads(args.params) if args.params else {}
    row = oracle_row(build_scenario(args.scenario, params))
    print(format_oracle_rows([row]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssplab", description="Tabular SSP regret experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Run an experiment from a JSON config.")
    p.add_argument("--config", required=True, help="Path to the experiment JSON file")
    p.add_argument("--output", default="", help="Override the run directory")
    p.add_argument("--workers", type=int, default=0, help="Override the worker count")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("aggregate", help="Rebuild aggregate CSVs of a run directory.")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("report", help="Print the final regret table of a run directory.")
    p.add_argument("--dir", required=True)
    p.add_argument("--plot", action="store_true", help="Also render SVG plots")
    p.add_argument("--early", type=float, default=0.1, help="Early window fraction")
    p.add_argument("--late", type=float, default=0.1, help="Late window fraction")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("oracle", help="Print V*, D and E[tau*] for a scenario.")
    p.add_argument("--scenario", required=True, choices=scenario_names())
    p.add_argument("--params", default="", help='Scenario parameters as JSON, e.g. \'{"beta": 0.5}\'')
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments and dispatch; library errors become exit code 2."""
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SspError as e:
        log.error(f"{type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
