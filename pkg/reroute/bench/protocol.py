from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path as FilePath
from typing import NamedTuple

import numpy as np

from ..cspace import CollisionChecker, CollisionWorld, RobotModel
from ..executor import EpisodeLog, EventKind, run_episode
from ..paths import Path, PathSet, recheck_path
from ..planners import UniformSampler, rrt_connect, rrt_star_optimize, shortcut
from ..replanner import BudgetMode, TimeBudget
from ..timing import MeteredStopwatch
from .export import export_episode
from .metrics import AggregateTable, MetricsRecord, records_from_log, write_records
from .renderer import render_summary
from .scenario import Scenario
from .spawns import build_spawns

__all__ = (
    "TrialResult",
    "ProtocolResult",
    "SoundnessViolation",
    "MonotonicityViolation",
    "plan_path_set",
    "run_trial",
    "run_protocol",
    "check_soundness",
    "check_monotonicity",
    "budget_compliance",
    "avoidance_success",
)


_log = logging.getLogger(__name__)


METRICS_FILE = "metrics.jsonl"
SUMMARY_FILE = "summary.txt"
PATHS_DIR = "paths"


class TrialResult(NamedTuple):
    """The outcome of one trial.

    Attributes
    ----------
    trial : int
        The trial number.
    log : EpisodeLog | None
        The episode log, or None when the trial was skipped.
    records : list[MetricsRecord]
        One record per accepted re-plan.
    """

    trial: int
    log: EpisodeLog | None
    records: list[MetricsRecord]

    @property
    def skipped(self) -> bool:
        """bool: Whether the initial paths could not be planned."""
        return self.log is None


class ProtocolResult(NamedTuple):
    """The outcome of a protocol run.

    Attributes
    ----------
    scenario : Scenario
        The scenario that was run.
    trials : list[TrialResult]
        Every trial, skipped ones included.
    table : AggregateTable
        The per-mode summary of every record.
    """

    scenario: Scenario
    trials: list[TrialResult]
    table: AggregateTable

    @property
    def records(self) -> list[MetricsRecord]:
        """list[MetricsRecord]: Every record, in trial order."""
        return [record for trial in self.trials for record in trial.records]

    @property
    def logs(self) -> list[EpisodeLog]:
        """list[EpisodeLog]: The logs of the trials that ran."""
        return [trial.log for trial in self.trials if trial.log is not None]

    @property
    def skipped(self) -> list[int]:
        """list[int]: The trials whose initial paths could not be planned."""
        return [trial.trial for trial in self.trials if trial.skipped]

    @property
    def failed(self) -> bool:
        """bool: Whether trials were requested and none of them ran."""
        return bool(self.trials) and len(self.skipped) == len(self.trials)


# region: Trials


def plan_path_set(scenario: Scenario, rng: np.random.Generator) -> PathSet | None:
    """Plans the initial paths from the start to the goal.

    Each path is found with bidirectional trees, shortened with an optimizing tree and then
    shortcut, all against the static obstacles.

    Returns
    -------
    PathSet | None
        The paths, the first one current; None when a path could not be found in time.
    """
    settings = scenario.settings
    snapshot = scenario.world.snapshot(0.0)
    connector = settings.connector
    sampler = UniformSampler(scenario.bounds)

    paths: list[Path] = []
    for index in range(scenario.path_count):
        stopwatch = MeteredStopwatch(settings.check_cost, settings.iteration_cost)
        checker = CollisionChecker(snapshot, scenario.robot, settings.resolution, stopwatch=stopwatch)
        path = rrt_connect(
            scenario.start_config,
            scenario.goal_config,
            checker,
            sampler,
            rng,
            stopwatch=stopwatch,
            max_time=scenario.planning.initial_time,
            step=connector.step,
            max_iterations=connector.max_iterations,
        )
        if path is None:
            _log.warning("Could not find initial path %d within %g s", index, scenario.planning.initial_time)
            return None

        stopwatch = MeteredStopwatch(settings.check_cost, settings.iteration_cost)
        checker = checker.with_stopwatch(stopwatch)
        path = rrt_star_optimize(
            path,
            checker,
            scenario.bounds,
            rng,
            stopwatch=stopwatch,
            max_time=scenario.planning.optimization_time,
            step=connector.step,
            max_iterations=connector.max_iterations,
        )
        path = shortcut(path, checker, rng, attempts=connector.shortcut_attempts)
        _log.debug("Initial path %d: %d nodes, length %.4f", index, len(path), path.length)
        paths.append(path)
    return PathSet(paths, 0)


async def run_trial(scenario: Scenario, trial: int, rng: np.random.Generator) -> TrialResult:
    """Plans the initial paths and runs one episode.

    Parameters
    ----------
    scenario : Scenario
        The scenario.
    trial : int
        The trial number.
    rng : np.random.Generator
        The random generator of the trial.

    Returns
    -------
    TrialResult
        The episode log and its records; a skipped result when planning failed.
    """
    planning_rng, spawn_rng, episode_rng = rng.spawn(3)
    path_set = plan_path_set(scenario, planning_rng)
    if path_set is None:
        _log.warning("Skipping trial %d: the initial paths could not be planned", trial)
        return TrialResult(trial, None, [])

    _log.info("Running trial %d", trial)
    log = await run_episode(
        path_set,
        scenario.world,
        scenario.settings,
        spawns=build_spawns(scenario, spawn_rng),
        rng=episode_rng,
        trial=trial,
    )
    records = records_from_log(log)
    _log.info(
        "Trial %d ended at t=%.3f: %s, %d re-plans accepted, %d safety stops",
        trial,
        log.end_time,
        "goal reached" if log.reached_goal else "goal not reached",
        len(records),
        log.safety_stops,
    )
    return TrialResult(trial, log, records)


async def run_protocol(scenario: Scenario, *, out_dir: FilePath | None = None) -> ProtocolResult:
    """Runs every trial of a scenario and aggregates the accepted re-plans.

    Parameters
    ----------
    scenario : Scenario
        The scenario.
    out_dir : FilePath | None, optional
        Where to write the metrics, the summary, the episode logs and the path dumps of the
        first trial that ran, by default nowhere.

    Returns
    -------
    ProtocolResult
        The trials and their summary.
    """
    streams = np.random.default_rng(scenario.seed).spawn(scenario.trials) if scenario.trials else []
    trials = [await run_trial(scenario, trial, stream) for trial, stream in enumerate(streams)]
    result = ProtocolResult(scenario, trials, AggregateTable.from_records(record for trial in trials for record in trial.records))
    _log.info(
        "Protocol finished: %d trials, %d skipped, %d avoidance and %d optimization re-plans",
        len(trials),
        len(result.skipped),
        result.table.avoidance.count,
        result.table.optimization.count,
    )
    if out_dir is not None:
        _write_outputs(result, out_dir)
    return result


def _write_outputs(result: ProtocolResult, out_dir: FilePath) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / METRICS_FILE).open("w", encoding="utf-8") as f:
        write_records(result.records, f)
    (out_dir / SUMMARY_FILE).write_text(render_summary(result.scenario.name, result.table, skipped=result.skipped), encoding="utf-8")
    for log in result.logs:
        with (out_dir / f"episode-{log.trial}.jsonl").open("w", encoding="utf-8") as f:
            log.write_jsonl(f)
    if result.logs:
        export_episode(result.logs[0], out_dir / PATHS_DIR)
    _log.info("Wrote the protocol outputs to %s", out_dir)


# endregion

# region: Acceptance checks


class SoundnessViolation(NamedTuple):
    """An accepted path that fails the independent re-check.

    Attributes
    ----------
    trial : int
        The trial of the episode.
    time : float
        When the path was accepted.
    snapshot_time : float
        The time of the obstacles it was planned against.
    """

    trial: int
    time: float
    snapshot_time: float


class MonotonicityViolation(NamedTuple):
    """An optimization re-plan that made the robot's remaining path longer.

    Attributes
    ----------
    trial : int
        The trial of the episode.
    time : float
        When the offending re-plan finished.
    previous : float
        The bound the remaining length had to respect.
    current : float
        The offending length.
    """

    trial: int
    time: float
    previous: float
    current: float


def check_soundness(log: EpisodeLog, robot: RobotModel, resolution: float) -> list[SoundnessViolation]:
    """Re-checks every accepted path at half the resolution against the obstacles it was planned with.

    Returns
    -------
    list[SoundnessViolation]
        The paths that collide; empty when all are sound.
    """
    world = CollisionWorld(static_boxes=tuple(log.static_boxes), moving_boxes=tuple(log.spawned_boxes))
    violations = []
    for event in log.of_kind(EventKind.SWAP):
        snapshot_time = float(event.data["snapshot_time"])
        if not recheck_path(Path(event.data["waypoints"]), world.snapshot(snapshot_time), robot, resolution / 2):
            violations.append(SoundnessViolation(log.trial, event.time, snapshot_time))
    return violations


def check_monotonicity(log: EpisodeLog, tolerance: float = 1e-9) -> list[MonotonicityViolation]:
    """Checks that optimization never lengthens what is left to travel while the world is unchanged.

    Within a run of optimization re-plans with no spawn in between, every accepted path is no
    longer than the path it replaced, and the remaining length seen by each re-plan is at most
    the length of the path the previous re-plan left the robot on, bridging included.

    Returns
    -------
    list[MonotonicityViolation]
        The offending re-plans; empty when the log is monotone.
    """
    violations = []
    bound = math.inf
    bridge = 0.0
    for event in log.of_kind(EventKind.SPAWN, EventKind.SWAP, EventKind.REPLAN_DONE):
        if event.kind is EventKind.SPAWN:
            bound = math.inf
            continue
        if event.kind is EventKind.SWAP:
            bridge = float(event.data["bridge_length"])
            continue

        current = float(event.data["current_length"])
        new_length = float(event.data["new_length"])
        if event.data["mode"] == BudgetMode.OPTIMIZATION:
            if current > bound + tolerance:
                violations.append(MonotonicityViolation(log.trial, event.time, bound, current))
            if event.data["accepted"] and new_length > current + tolerance:
                violations.append(MonotonicityViolation(log.trial, event.time, current, new_length))
            bound = new_length + bridge if event.data["accepted"] else current
        else:
            bound = new_length + bridge if event.data["accepted"] else math.inf
        bridge = 0.0
    return violations


def budget_compliance(logs: Iterable[EpisodeLog], budget: TimeBudget) -> float:
    """Returns the share of re-plans that finished within their budget plus one mean cycle.

    The mean cycle is the one the re-planner gated on: the mean duration of its switching searches
    that found a feasible path.

    Returns
    -------
    float
        A fraction in ``[0, 1]``; 1 when there were no re-plans.
    """
    total = 0
    within = 0
    for log in logs:
        for event in log.of_kind(EventKind.REPLAN_DONE):
            limit = budget.reduced_time if event.data["mode"] == BudgetMode.AVOIDANCE else budget.relaxed_time
            elapsed = float(event.data["elapsed"])
            total += 1
            within += elapsed <= limit + float(event.data.get("mean_cycle", 0.0))
    return within / total if total else 1.0


def avoidance_success(results: Sequence[TrialResult]) -> float:
    """Returns the share of avoidance re-plans that found a feasible path; 1 when there were none."""
    attempts = [
        bool(event.data["feasible"])
        for trial in results
        if trial.log is not None
        for event in trial.log.of_kind(EventKind.REPLAN_DONE)
        if event.data["mode"] == BudgetMode.AVOIDANCE
    ]
    return sum(attempts) / len(attempts) if attempts else 1.0


# endregion
