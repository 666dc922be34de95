"""
Command line interface.

    pushpull-fatigue simulate --scenario task.json --out trace.csv [--summary s.json]
    pushpull-fatigue sweep --scenario task.json --grid grid.json --out sweep.csv

Exit code 0 on success, 1 when an input file is invalid and 2 when the
simulation fails.
"""
import argparse
import logging
import sys
from typing import List, Optional

from .__version__ import __version__
from .consts import (
    EXIT_OK,
    EXIT_RUNTIME_FAILURE,
    EXIT_VALIDATION_FAILURE,
    SECONDS_PER_MINUTE,
    FatigueMode,
)
from .exceptions import FatigueSimulatorException, ScenarioException
from .runner import run, write_summary_json, write_trace_csv
from .scenario import load_scenario_file, validate_run_settings
from .sweep import load_sweep_grid_file, run_sweep, write_sweep_csv

_LOGGER = logging.getLogger(__name__)


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate one scenario."""
    scenario = load_scenario_file(args.scenario)
    overrides = {}
    if args.mode:
        overrides["mode"] = FatigueMode(args.mode)
    if args.duration_s is not None:
        overrides["duration"] = args.duration_s
    if args.dt_s is not None:
        overrides["dt"] = args.dt_s
    if overrides:
        scenario = scenario.with_run(**overrides)
        validate_run_settings(scenario)
    result = run(scenario)
    write_trace_csv(result.trace, args.out)
    if args.summary:
        write_summary_json(result.summary, args.summary)
    for joint, value in result.summary.crossings.items():
        if value is None:
            print(f"{joint.value}: no risk crossing within {scenario.run.duration} s")
        else:
            print(
                f"{joint.value}: risk crossing at {value:.2f} s "
                f"({value / SECONDS_PER_MINUTE:.2f} min)"
            )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Evaluate a grid of task variants."""
    scenario = load_scenario_file(args.scenario)
    grid = load_sweep_grid_file(args.grid)
    result = run_sweep(scenario, grid, max_workers=args.workers, timeout=args.timeout)
    write_sweep_csv(result, args.out)
    print(f"{result.statistics.total} cells, {result.statistics!r}")
    if result.best is not None:
        print(f"best cell {result.best.cell}, objective {result.best.objective}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="pushpull-fatigue",
        description="Arm muscle fatigue of repetitive push/pull tasks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress (-v) or debug details (-vv)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate_parser = subparsers.add_parser("simulate", help="simulate one scenario")
    simulate_parser.add_argument("--scenario", required=True, help="scenario JSON file")
    simulate_parser.add_argument("--out", required=True, help="trace CSV file")
    simulate_parser.add_argument("--summary", help="summary JSON file")
    simulate_parser.add_argument(
        "--mode",
        choices=[mode.value for mode in FatigueMode],
        help="capacity mode, overrides run.mode",
    )
    simulate_parser.add_argument(
        "--duration-s", type=float, help="horizon in seconds, overrides run.duration_s"
    )
    simulate_parser.add_argument(
        "--dt-s", type=float, help="time step in seconds, overrides run.dt_s"
    )
    simulate_parser.set_defaults(func=cmd_simulate)

    sweep_parser = subparsers.add_parser("sweep", help="rank task variants")
    sweep_parser.add_argument(
        "--scenario", required=True, help="base scenario JSON file"
    )
    sweep_parser.add_argument("--grid", required=True, help="grid JSON file")
    sweep_parser.add_argument("--out", required=True, help="ranked CSV file")
    sweep_parser.add_argument(
        "--workers", type=int, default=None, help="worker threads (default: automatic)"
    )
    sweep_parser.add_argument(
        "--timeout", type=float, default=None, help="per-cell timeout in seconds"
    )
    sweep_parser.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line interface and return the exit code."""
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except ScenarioException as error:
        _LOGGER.error("Invalid input: %s", error)
        return EXIT_VALIDATION_FAILURE
    except FatigueSimulatorException as error:
        _LOGGER.error("Simulation failed: %s", error)
        return EXIT_RUNTIME_FAILURE
    except OSError as error:
        _LOGGER.error("Cannot write output: %s", error)
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())
