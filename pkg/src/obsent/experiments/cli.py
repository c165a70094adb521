"""Command-line front end: run scenarios, print the invariant suite,
inspect defaults.

Exit codes: 0 success, 2 configuration error, 3 capacity (problem size)
error, 4 invariant-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import CapacityError, ConfigError, DomainError
from .config import load_config
from .csvio import write_csv
from .properties import run_property_suite
from .scenarios import get_scenario, run_scenario, scenario_ids

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_SUITE_FAILED = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsent",
        description="entropy simulations on a spinless fermion chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its CSV")
    run.add_argument("scenario", help="scenario id (see list-scenarios)")
    run.add_argument("--config", default=None, metavar="FILE",
                     help="INI config layered over the scenario defaults")
    run.add_argument("--out", default=".", metavar="DIR",
                     help="output directory (default: current directory)")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="SECTION.KEY=VALUE",
                     help="override one config value (repeatable)")

    suite = sub.add_parser("suite", help="run the randomized invariant suite")
    suite.add_argument("--config", default=None, metavar="FILE")
    suite.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE")

    sub.add_parser("list-scenarios", help="list scenario ids")

    describe = sub.add_parser("describe", help="show a scenario's default config")
    describe.add_argument("scenario")
    return parser


def _cmd_run(args) -> int:
    scenario = get_scenario(args.scenario)
    cfg = load_config(scenario.defaults, args.config, args.overrides)
    metadata, header, rows = run_scenario(args.scenario, cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{args.scenario}.csv"
    write_csv(out_path, metadata, header, rows)
    print(f"wrote {out_path} ({len(rows)} rows, config {cfg.hash()})")
    if metadata.get("suite_passed") == 0:
        print("invariant suite FAILED; see the report rows", file=sys.stderr)
        return EXIT_SUITE_FAILED
    return EXIT_OK


def _cmd_suite(args) -> int:
    defaults = get_scenario("property_suite").defaults
    cfg = load_config(defaults, args.config, args.overrides)
    report = run_property_suite(
        dims=cfg.get_int_list("suite.dims") or None,
        trials=cfg.get_int("suite.trials"),
        seed=cfg.get_int("suite.seed"),
        include_chain=bool(cfg.get_int("suite.include_chain")),
    )
    for line in report.summary_lines():
        print(line)
    if not report.passed:
        print("invariant suite FAILED", file=sys.stderr)
        return EXIT_SUITE_FAILED
    print("all invariants hold")
    return EXIT_OK


def _cmd_list() -> int:
    for sid in scenario_ids():
        print(f"{sid:<20} {get_scenario(sid).description}")
    return EXIT_OK


def _cmd_describe(args) -> int:
    scenario = get_scenario(args.scenario)
    print(f"{scenario.scenario_id}: {scenario.description}")
    print()
    for section in sorted(scenario.defaults):
        print(f"[{section}]")
        for key in sorted(scenario.defaults[section]):
            print(f"{key} = {scenario.defaults[section][key]}")
        print()
    print("override any value with --set section.key=value")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "suite":
            return _cmd_suite(args)
        if args.command == "list-scenarios":
            return _cmd_list()
        return _cmd_describe(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    raise SystemExit(main())
