from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from collections.abc import Sequence
from pathlib import Path as FilePath

from ..configuration import Configuration
from ..errors import ContractViolation, ScenarioError
from ..executor import ClockMode, EpisodeLog
from .export import export_episode
from .protocol import avoidance_success, budget_compliance, check_monotonicity, check_soundness, run_protocol
from .renderer import render_summary
from .scenario import load_scenario

__all__ = ("main",)


_log = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_PROTOCOL_FAILED = 1
EXIT_INVALID = 2


def _parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="reroute", description="Anytime re-planning over a set of pre-computed paths.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run the experimental protocol of a scenario")
    run.add_argument("scenario", help="a scenario file, or the name of a shipped scenario")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--trials", type=int, help="override the number of trials")
    run.add_argument("--out", type=FilePath, help="the output directory")
    run.add_argument("--wall-clock", action="store_true", help="run episodes against the wall clock")

    validate = commands.add_parser("validate", help="parse a scenario and print its summary")
    validate.add_argument("scenario", help="a scenario file, or the name of a shipped scenario")

    export = commands.add_parser("export", help="write plot-ready dumps of a stored episode log")
    export.add_argument("log", type=FilePath, help="an episode-<trial>.jsonl file")
    export.add_argument("dir", type=FilePath, help="the directory to write the dumps to")

    return parser.parse_args(argv)


def _run(args: argparse.Namespace, config: Configuration) -> int:
    scenario = load_scenario(config.resolve_scenario(args.scenario))
    wall_clock = args.wall_clock or config.wall_clock
    scenario = scenario.with_overrides(
        seed=args.seed if args.seed is not None else config.seed,
        trials=args.trials,
        clock_mode=ClockMode.WALL if wall_clock else None,
    )
    out_dir = args.out if args.out is not None else config.output_dir / scenario.name

    result = asyncio.run(run_protocol(scenario, out_dir=out_dir))
    sys.stdout.write(render_summary(scenario.name, result.table, skipped=result.skipped, colour=sys.stdout.isatty()))

    for log in result.logs:
        for violation in check_soundness(log, scenario.robot, scenario.settings.resolution):
            _log.warning("Trial %d accepted a colliding path at t=%.3f", violation.trial, violation.time)
        for violation in check_monotonicity(log):
            _log.warning("Trial %d lengthened the remaining path at t=%.3f: %.4f > %.4f", *violation)
    _log.info(
        "Budget compliance %.1f%%, avoidance success %.1f%%",
        100 * budget_compliance(result.logs, scenario.budget),
        100 * avoidance_success(result.trials),
    )

    if result.failed:
        _log.error("Every trial was skipped: no initial path set could be planned")
        return EXIT_PROTOCOL_FAILED
    return EXIT_OK


def _validate(args: argparse.Namespace, config: Configuration) -> int:
    scenario = load_scenario(config.resolve_scenario(args.scenario))
    sys.stdout.write(scenario.describe() + "\n")
    return EXIT_OK


def _export(args: argparse.Namespace) -> int:
    with args.log.open("r", encoding="utf-8") as f:
        log = EpisodeLog.read_jsonl(f)
    for path in export_episode(log, args.dir):
        sys.stdout.write(f"{path}\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Runs the command line.

    Parameters
    ----------
    argv : Sequence[str] | None, optional
        The arguments, by default those of the process.

    Returns
    -------
    int
        The exit code: 0 on success, 1 when every trial was skipped, 2 on an invalid scenario or log.
    """
    args = _parse_args(argv)
    config = Configuration()
    try:
        match args.command:
            case "run":
                return _run(args, config)
            case "validate":
                return _validate(args, config)
            case "export":
                return _export(args)
            case _:
                raise AssertionError(f"unknown command {args.command!r}")
    except ScenarioError as e:
        _log.error("Invalid scenario: %s", e)
        return EXIT_INVALID
    except ContractViolation as e:
        _log.error("Invalid episode log: %s", e)
        return EXIT_INVALID
    except OSError as e:
        _log.error("%s", e)
        return EXIT_PROTOCOL_FAILED
