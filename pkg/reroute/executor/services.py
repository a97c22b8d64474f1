from __future__ import annotations

import asyncio
import logging
import math
import time
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from audino import HealthTracker
from malamar import Service
from rayquaza import Mediator

from ..cspace import CollisionChecker, CollisionWorld, Configuration
from ..health import HealthStatusId
from ..mediator import ChannelNames, CollisionVerdictResult, GetCollisionVerdictRequest
from ..paths import NODE_TOLERANCE, CollisionReport, Node, Path, PathProjector, PathSet, Projection, check_path_with, project_on_path
from ..replanner import BudgetMode, PlanningContext, ReplanOutcome, TimeBudget, current_remainder, informed_online_replanning, update_budget
from .clock import SimClock
from .events import EpisodeLog, EventKind
from .mailbox import Mailbox
from .settings import EpisodeSettings
from .trajectory import Trajectory, compute_trajectory, sample_trajectory

__all__ = (
    "RobotState",
    "MotionCommand",
    "PendingReplan",
    "ExecutionService",
    "CollisionService",
    "ReplanningService",
    "remaining_length",
    "bridge_onto",
)


_log = logging.getLogger(__name__)


def _follow(projector: PathProjector | None, path: Path) -> PathProjector:
    # Verdicts re-flag the same waypoints every tick; only a new route restarts the projection.
    if projector is None or not np.array_equal(projector.path.waypoints, path.waypoints):
        return PathProjector(path)
    return projector


def _along_old_path(q: npt.NDArray[np.float64], old_path: Path, x_h: Node) -> Projection:
    # The robot only moves forward along the old path from the re-plan start.
    old = old_path.cleared()
    return PathProjector(old.subpath(x_h, old.goal)).project(q)


def remaining_length(q: Configuration, old_path: Path, x_h: Node) -> float:
    """Returns what the robot at ``q`` has left to travel on the path it followed from ``x_h``."""
    here = _along_old_path(np.asarray(q, dtype=np.float64), old_path, x_h)
    return here.distance + here.path.length - here.arc


def bridge_onto(q: Configuration, new_path: Path, old_path: Path, x_h: Node, checker: CollisionChecker) -> Path | None:
    """Roots a re-planned path at the robot's latest configuration.

    The robot kept following ``old_path`` while the re-plan from ``x_h`` ran. When it is off the
    new path, a straight free edge joins them; otherwise the robot backs up along the old path to
    ``x_h``, provided that way is free.

    Parameters
    ----------
    q : Configuration
        The robot configuration.
    new_path : Path
        The re-planned path, starting at ``x_h``.
    old_path : Path
        The path the robot was following, through ``x_h``.
    x_h : Node
        Where the re-plan started.
    checker : CollisionChecker
        The collision checker bound to the latest snapshot.

    Returns
    -------
    Path | None
        The path to follow from ``q``, or None when neither way onto the new path is free.
    """
    q = np.asarray(q, dtype=np.float64)
    projection = project_on_path(q, new_path)
    rest = projection.path.slice(projection.index, len(projection.path) - 1)
    if projection.distance <= NODE_TOLERANCE:
        return rest
    if checker.segment_free(q, projection.node.array):
        return Path(np.concatenate((q[None, :], rest.waypoints), axis=0))

    here = _along_old_path(q, old_path, x_h)
    back = here.path.slice(0, here.index).reversed()
    if here.distance > NODE_TOLERANCE:
        back = Path(np.concatenate((q[None, :], back.waypoints), axis=0))
    if check_path_with(back, checker).obstructed:
        return None
    return back.concat(new_path)


class RobotState(NamedTuple):
    """The robot as last seen by the execution loop.

    Attributes
    ----------
    time : float
        The execution tick time, in seconds.
    config : tuple[float, ...]
        The configuration.
    stopped : bool
        Whether a safety stop is in force.
    goal_reached : bool
        Whether the goal has been reached.
    """

    time: float
    config: tuple[float, ...]
    stopped: bool
    goal_reached: bool


class MotionCommand(NamedTuple):
    """An instruction for the execution loop.

    Attributes
    ----------
    trajectory : Trajectory | None
        The trajectory to follow from now on, or None for a safety stop.
    issued_at : float
        When the command was issued, in seconds.
    reason : str
        Why the command was issued.
    """

    trajectory: Trajectory | None
    issued_at: float
    reason: str


class PendingReplan(NamedTuple):
    """A finished re-planning computation waiting to be delivered.

    Attributes
    ----------
    outcome : ReplanOutcome
        The re-planning result.
    x_h : Node
        The robot configuration the re-plan started from.
    path_set : PathSet
        The path set the re-plan used.
    report : CollisionReport
        The verdict the re-plan used for the current path.
    started_at : float
        The episode time the re-plan started, in seconds.
    wall_elapsed : float
        The real time the computation took, in seconds.
    """

    outcome: ReplanOutcome
    x_h: Node
    path_set: PathSet
    report: CollisionReport
    started_at: float
    wall_elapsed: float


# region: Execution


class ExecutionService(Service):
    """A service that moves the robot along its trajectory at every execution tick."""

    def __init__(
        self,
        *,
        health_tracker: HealthTracker,
        clock: SimClock,
        settings: EpisodeSettings,
        log: EpisodeLog,
        state_box: Mailbox[RobotState],
        command_box: Mailbox[MotionCommand],
        trajectory: Trajectory,
    ) -> None:
        """Initializes the execution service.

        Parameters
        ----------
        health_tracker : HealthTracker
            The health tracker to report robot motion to.
        clock : SimClock
            The episode clock.
        settings : EpisodeSettings
            The episode parameters.
        log : EpisodeLog
            The log to record events and states in.
        state_box : Mailbox[RobotState]
            Where the robot state is published.
        command_box : Mailbox[MotionCommand]
            Where trajectory swaps and safety stops arrive.
        trajectory : Trajectory
            The initial trajectory.
        """
        self._health_tracker = health_tracker
        self._clock = clock
        self._settings = settings
        self._log = log
        self._state_box = state_box
        self._command_box = command_box
        self._command_version = command_box.version
        self._trajectory = trajectory
        self._config: Configuration = trajectory.path.waypoints[0].copy()
        self._goal = trajectory.path.waypoints[-1].copy()
        self.stopped: bool = False
        self.finished: bool = False
        super().__init__()

    @property
    def trajectory(self) -> Trajectory:
        """Trajectory: The trajectory being followed."""
        return self._trajectory

    async def _apply_command(self, command: MotionCommand, now: float) -> None:
        if command.trajectory is None:
            if not self.stopped:
                self.stopped = True
                self._log.record(EventKind.SAFETY_STOP, now, config=list(self._config), reason=command.reason)
                _log.info("Safety stop at t=%.3f: %s", now, command.reason)
                await self._health_tracker.set_health(HealthStatusId.ROBOT_MOVING, False)
            return

        self._trajectory = command.trajectory
        if self.stopped:
            self.stopped = False
            self._log.record(EventKind.RESUME, now, config=list(self._config))
            _log.info("Resuming motion at t=%.3f", now)
            await self._health_tracker.set_health(HealthStatusId.ROBOT_MOVING, True)

    async def tick(self) -> None:
        """Advances the robot to the current clock time."""
        if self.finished:
            return
        now = self._clock.now
        command, self._command_version = self._command_box.take_if_newer(self._command_version)
        if command is not None:
            await self._apply_command(command, now)

        if not self.stopped:
            self._config = sample_trajectory(self._trajectory, max(now, self._trajectory.start_time))
        config = tuple(float(v) for v in self._config)
        self._log.states.append((now, config))

        if not self.stopped and float(np.linalg.norm(self._config - self._goal)) <= self._settings.goal_tolerance:
            self.finished = True
            self._log.record(EventKind.GOAL_REACHED, now, config=list(config))
            _log.info("Goal reached at t=%.3f", now)
        self._state_box.put(RobotState(now, config, self.stopped, self.finished))

    async def start(self, *, timeout: float | None = None) -> None:
        """Starts the execution service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to start.
        """
        await self._health_tracker.set_health(HealthStatusId.ROBOT_MOVING, True)
        await self.tick()

    async def stop(self, *, timeout: float | None = None) -> None:
        """Stops the execution service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to stop.
        """
        _log.debug("Execution service stopped at t=%.3f", self._clock.now)


# endregion

# region: Collision checking


class CollisionService(Service):
    """A service that checks every path against the current obstacles and answers verdict requests."""

    def __init__(
        self,
        *,
        mediator: Mediator,
        health_tracker: HealthTracker,
        clock: SimClock,
        settings: EpisodeSettings,
        log: EpisodeLog,
        world_box: Mailbox[CollisionWorld],
        state_box: Mailbox[RobotState],
        path_set_box: Mailbox[PathSet],
    ) -> None:
        """Initializes the collision service.

        Parameters
        ----------
        mediator : Mediator
            The mediator to answer verdict requests on.
        health_tracker : HealthTracker
            The health tracker to report path feasibility to.
        clock : SimClock
            The episode clock.
        settings : EpisodeSettings
            The episode parameters.
        log : EpisodeLog
            The log to record events in.
        world_box : Mailbox[CollisionWorld]
            Where the obstacle world is published.
        state_box : Mailbox[RobotState]
            Where the robot state is published.
        path_set_box : Mailbox[PathSet]
            Where the path set is published.
        """
        self._mediator = mediator
        self._health_tracker = health_tracker
        self._clock = clock
        self._settings = settings
        self._log = log
        self._world_box = world_box
        self._state_box = state_box
        self._path_set_box = path_set_box
        self._projector: PathProjector | None = None
        self._budget: TimeBudget = settings.budget
        self._verdict: CollisionVerdictResult | None = None
        super().__init__()

    @property
    def verdict(self) -> CollisionVerdictResult | None:
        """CollisionVerdictResult | None: The latest verdict."""
        return self._verdict

    def _project(self, config: tuple[float, ...], path: Path) -> Node:
        self._projector = _follow(self._projector, path)
        return self._projector.project(np.asarray(config)).node

    async def tick(self) -> None:
        """Checks the path set against the obstacles present now."""
        now = self._clock.now
        world = self._world_box.get()
        path_set = self._path_set_box.get()
        state = self._state_box.get()
        if world is None or path_set is None or state is None:
            return

        snapshot = world.snapshot(now)
        checker = CollisionChecker(snapshot, self._settings.robot, self._settings.resolution)
        x_h = self._project(state.config, path_set.current)
        remainder = current_remainder(path_set, x_h)

        reports: list[CollisionReport | None] = []
        for index, path in enumerate(path_set):
            reports.append(None if index == path_set.current_index else check_path_with(path.cleared(), checker))
        report = check_path_with(remainder, checker)
        flagged = PathSet([path.cleared() for path in path_set], path_set.current_index).with_flags(reports)

        was_obstructed = self._verdict is not None and self._verdict.report.obstructed
        if report.obstructed and not was_obstructed:
            self._log.record(
                EventKind.COLLISION_DETECTED,
                now,
                x_before=list(report.x_before.config) if report.x_before else None,
                x_after=list(report.x_after.config) if report.x_after else None,
                blocked_edges=list(report.blocked_edges),
            )

        budget = update_budget(report, self._budget)
        if budget.mode is not self._budget.mode:
            self._log.record(EventKind.BUDGET_CHANGE, now, mode=str(budget.mode), t_rp=budget.t_rp)
        self._budget = budget

        self._verdict = CollisionVerdictResult(report=report, snapshot=snapshot, path_set=flagged, budget=budget, checked_at=now)
        await self._health_tracker.set_health(HealthStatusId.CURRENT_PATH_FEASIBLE, not report.obstructed)

    # region: Mediator message handlers

    async def _handle_get_collision_verdict_request(self, request: GetCollisionVerdictRequest) -> CollisionVerdictResult | None:
        return self._verdict

    # endregion

    async def start(self, *, timeout: float | None = None) -> None:
        """Starts the collision service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to start.
        """
        self._mediator.create_subscription(ChannelNames.COLLISION, GetCollisionVerdictRequest, self._handle_get_collision_verdict_request)
        await self._health_tracker.set_health(HealthStatusId.CURRENT_PATH_FEASIBLE, True)
        await self.tick()

    async def stop(self, *, timeout: float | None = None) -> None:
        """Stops the collision service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to stop.
        """
        self._mediator.unsubscribe(ChannelNames.COLLISION, GetCollisionVerdictRequest, self._handle_get_collision_verdict_request)


# endregion

# region: Re-planning


class ReplanningService(Service):
    """A service that re-plans the current path and hands accepted paths to the execution loop."""

    def __init__(
        self,
        *,
        mediator: Mediator,
        health_tracker: HealthTracker,
        clock: SimClock,
        settings: EpisodeSettings,
        log: EpisodeLog,
        rng: np.random.Generator,
        state_box: Mailbox[RobotState],
        path_set_box: Mailbox[PathSet],
        command_box: Mailbox[MotionCommand],
    ) -> None:
        """Initializes the re-planning service.

        Parameters
        ----------
        mediator : Mediator
            The mediator to request collision verdicts on.
        health_tracker : HealthTracker
            The health tracker to watch.
        clock : SimClock
            The episode clock.
        settings : EpisodeSettings
            The episode parameters.
        log : EpisodeLog
            The log to record events in.
        rng : np.random.Generator
            The random generator of the planners.
        state_box : Mailbox[RobotState]
            Where the robot state is published.
        path_set_box : Mailbox[PathSet]
            Where the path set is published; updated on every swap.
        command_box : Mailbox[MotionCommand]
            Where trajectory swaps and safety stops are sent.
        """
        self._mediator = mediator
        self._health_tracker = health_tracker
        self._clock = clock
        self._settings = settings
        self._log = log
        self._rng = rng
        self._state_box = state_box
        self._path_set_box = path_set_box
        self._command_box = command_box
        self._projector: PathProjector | None = None
        self.invocations: int = 0
        super().__init__()

    async def _handle_health_update(self, health_status_id: str, healthy: bool) -> None:
        if health_status_id == HealthStatusId.CURRENT_PATH_FEASIBLE:
            _log.debug("Current path is %s", "free" if healthy else "obstructed")
        elif health_status_id == HealthStatusId.ROBOT_MOVING:
            _log.debug("Robot is %s", "moving" if healthy else "stopped")

    def _project(self, config: tuple[float, ...], path: Path) -> Node:
        self._projector = _follow(self._projector, path)
        return self._projector.project(np.asarray(config)).node

    def _plan(self, verdict: CollisionVerdictResult, path_set: PathSet, x_h: Node, started_at: float) -> PendingReplan:
        settings = self._settings
        sigma_cur = current_remainder(path_set, x_h)
        report = check_path_with(sigma_cur, CollisionChecker(verdict.snapshot, settings.robot, settings.resolution))
        budget = update_budget(report, verdict.budget)

        stopwatch = settings.new_stopwatch()
        checker = CollisionChecker(verdict.snapshot, settings.robot, settings.resolution, stopwatch=stopwatch)
        context = PlanningContext(
            checker=checker,
            bounds=settings.bounds,
            rng=self._rng,
            stopwatch=stopwatch,
            connector=settings.connector,
            merge_threshold=settings.merge_threshold,
        )
        wall_started = time.perf_counter()
        outcome = informed_online_replanning(path_set, x_h, budget, report, context)
        wall_elapsed = time.perf_counter() - wall_started
        return PendingReplan(outcome, x_h, path_set, report, started_at, wall_elapsed)

    async def replan(self, *, in_executor: bool = False) -> PendingReplan | None:
        """Runs one re-planning invocation from the latest robot state.

        Parameters
        ----------
        in_executor : bool, optional
            Whether to run the computation in the default thread pool, by default False.

        Returns
        -------
        PendingReplan | None
            The computation result, or None when there is nothing to re-plan yet.
        """
        verdict: CollisionVerdictResult | None = await self._mediator.request(ChannelNames.COLLISION, GetCollisionVerdictRequest())
        state = self._state_box.get()
        if verdict is None or state is None or state.goal_reached:
            return None

        # A swap may be newer than the last collision check; the other paths keep their flags.
        latest = self._path_set_box.get()
        path_set = verdict.path_set if latest is None else verdict.path_set.with_current(latest.current.cleared())
        now = self._clock.now
        x_h = self._project(state.config, path_set.current)
        self.invocations += 1
        self._log.record(EventKind.REPLAN_START, now, mode=str(verdict.budget.mode), x_h=list(x_h.config))

        if in_executor:
            loop = asyncio.get_running_loop()
            return await loop.run_in_executor(None, self._plan, verdict, path_set, x_h, now)
        return self._plan(verdict, path_set, x_h, now)

    async def _bridge(self, state: RobotState, pending: PendingReplan) -> Path | None:
        verdict: CollisionVerdictResult | None = await self._mediator.request(ChannelNames.COLLISION, GetCollisionVerdictRequest())
        if verdict is None:
            return None
        checker = CollisionChecker(verdict.snapshot, self._settings.robot, self._settings.resolution)
        return bridge_onto(state.config, pending.outcome.path, pending.path_set.current, pending.x_h, checker)

    async def _accept(self, state: RobotState, pending: PendingReplan) -> tuple[Path | None, str | None]:
        outcome = pending.outcome
        if not outcome.feasible:
            return None, "no feasible re-plan for the obstructed path"
        if not outcome.improved:
            return None, None
        path = await self._bridge(state, pending)
        if path is None:
            return None, "no free way onto the re-planned path"
        if outcome.mode is BudgetMode.OPTIMIZATION:
            remaining = remaining_length(state.config, pending.path_set.current, pending.x_h)
            if path.length >= remaining - NODE_TOLERANCE:
                return None, f"bridged length {path.length:.4f} does not beat the remaining {remaining:.4f}"
        return path, None

    async def deliver(self, pending: PendingReplan) -> None:
        """Hands a finished re-plan to the execution loop.

        An improved path becomes the new trajectory when the robot can get onto it and, while
        optimizing, when it shortens what the robot has left to travel. An obstructed current path
        with no usable re-plan triggers a safety stop.
        """
        now = self._clock.now
        outcome = pending.outcome
        state = self._state_box.get()
        accepted = False
        rejection: str | None = None

        if state is not None and not state.goal_reached:
            path, rejection = await self._accept(state, pending)
            if path is not None:
                trajectory = compute_trajectory(path, self._settings.speed, state.time)
                self._command_box.put(MotionCommand(trajectory, now, str(outcome.mode)))
                latest = self._path_set_box.get() or pending.path_set
                self._path_set_box.put(PathSet([p.cleared() for p in latest], latest.current_index).with_current(path))
                self._log.record(
                    EventKind.SWAP,
                    now,
                    mode=str(outcome.mode),
                    length=outcome.path.length,
                    bridge_length=path.length - outcome.path.length,
                    snapshot_time=pending.report.checked_at,
                    waypoints=outcome.path.waypoints.tolist(),
                )
                accepted = True
            elif outcome.mode is BudgetMode.AVOIDANCE and not state.stopped:
                self._command_box.put(MotionCommand(None, now, rejection or "no feasible re-plan for the obstructed path"))
            if rejection is not None:
                _log.debug("Re-plan rejected at t=%.3f: %s", now, rejection)

        self._log.record(
            EventKind.REPLAN_DONE,
            now,
            mode=str(outcome.mode),
            accepted=accepted,
            feasible=outcome.feasible,
            improved=outcome.improved,
            current_length=outcome.current_length,
            new_length=outcome.path.length,
            new_cost=outcome.path.cost if math.isfinite(outcome.path.cost) else None,
            elapsed=outcome.elapsed,
            wall_elapsed=pending.wall_elapsed,
            started_at=pending.started_at,
            cycles=outcome.stats.cycles,
            successful_cycles=outcome.stats.successful_cycles,
            pruned=len(outcome.stats.pruned),
            merged=outcome.stats.merged,
            mean_cycle=outcome.mean_cycle,
            rejection=rejection,
        )

    async def start(self, *, timeout: float | None = None) -> None:
        """Starts the re-planning service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to start.
        """
        self._health_tracker.subscribe(self._handle_health_update)

    async def stop(self, *, timeout: float | None = None) -> None:
        """Stops the re-planning service.

        Paramters
        ----------
        timeout : float | None
            The maximum time to wait for the service to stop.
        """
        _log.debug("Re-planning service stopped after %d invocations", self.invocations)


# endregion
