from __future__ import annotations

import asyncio
import logging
from collections.abc import Awaitable, Callable, Sequence
from typing import NamedTuple, Protocol

import numpy as np
from audino import HealthTracker
from rayquaza import Mediator

from ..cspace import Box, CollisionWorld, RobotModel
from ..errors import ContractViolation
from ..paths import PathSet
from .clock import ClockMode, EventScheduler, Priority, SimClock
from .events import EpisodeLog, EventKind, box_to_data
from .mailbox import Mailbox
from .services import CollisionService, ExecutionService, MotionCommand, ReplanningService, RobotState
from .settings import EpisodeSettings
from .trajectory import compute_trajectory

__all__ = (
    "SpawnContext",
    "Spawner",
    "ScheduledSpawn",
    "run_episode",
)


_log = logging.getLogger(__name__)


class SpawnContext(NamedTuple):
    """What a spawner may look at when placing an obstacle.

    Attributes
    ----------
    time : float
        The spawn time, in seconds.
    state : RobotState
        The latest robot state.
    path_set : PathSet
        The path set, with the path being executed as its current path.
    robot : RobotModel
        The robot geometry.
    rng : np.random.Generator
        The random generator of the episode.
    """

    time: float
    state: RobotState
    path_set: PathSet
    robot: RobotModel
    rng: np.random.Generator


class Spawner(Protocol):
    """Places one obstacle, or declines to."""

    def __call__(self, context: SpawnContext) -> Box | None: ...


class ScheduledSpawn(NamedTuple):
    """An obstacle spawn planned for a given episode time.

    Attributes
    ----------
    time : float
        When the obstacle appears, in seconds.
    spawner : Spawner
        Places the obstacle.
    """

    time: float
    spawner: Spawner


class _Episode:
    """The loops and mailboxes of one episode."""

    def __init__(
        self,
        path_set: PathSet,
        world: CollisionWorld,
        settings: EpisodeSettings,
        spawns: Sequence[ScheduledSpawn],
        rng: np.random.Generator,
        trial: int,
    ) -> None:
        self.settings = settings
        # The planners may run in a worker thread, so they get a stream of their own.
        planner_rng, self.rng = rng.spawn(2)
        self.clock = SimClock(settings.execution_period, settings.clock_mode)
        self.log = EpisodeLog(trial=trial, initial_paths=list(path_set), static_boxes=list(world.static_boxes))
        self.spawns = sorted(spawns, key=lambda spawn: spawn.time)

        mediator = Mediator()
        health_tracker = HealthTracker(mediator=mediator)

        self.world_box: Mailbox[CollisionWorld] = Mailbox("world", world)
        self.state_box: Mailbox[RobotState] = Mailbox("state")
        self.path_set_box: Mailbox[PathSet] = Mailbox("path_set", path_set)
        command_box: Mailbox[MotionCommand] = Mailbox("command")

        trajectory = compute_trajectory(path_set.current, settings.speed, 0.0)
        self.execution = ExecutionService(
            health_tracker=health_tracker,
            clock=self.clock,
            settings=settings,
            log=self.log,
            state_box=self.state_box,
            command_box=command_box,
            trajectory=trajectory,
        )
        self.collision = CollisionService(
            mediator=mediator,
            health_tracker=health_tracker,
            clock=self.clock,
            settings=settings,
            log=self.log,
            world_box=self.world_box,
            state_box=self.state_box,
            path_set_box=self.path_set_box,
        )
        self.replanning = ReplanningService(
            mediator=mediator,
            health_tracker=health_tracker,
            clock=self.clock,
            settings=settings,
            log=self.log,
            rng=planner_rng,
            state_box=self.state_box,
            path_set_box=self.path_set_box,
            command_box=command_box,
        )

    @property
    def services(self) -> tuple[ExecutionService, CollisionService, ReplanningService]:
        return self.execution, self.collision, self.replanning

    async def spawn(self, spawn: ScheduledSpawn) -> None:
        if self.execution.finished:
            _log.warning("Skipping the obstacle due at t=%.3f, the goal was already reached", spawn.time)
            return
        state = self.state_box.get()
        path_set = self.path_set_box.get()
        world = self.world_box.get()
        assert state is not None and path_set is not None and world is not None

        now = self.clock.now
        box = spawn.spawner(SpawnContext(now, state, path_set, self.settings.robot, self.rng))
        if box is None:
            _log.debug("No obstacle placed at t=%.3f", now)
            return
        if box.spawn_time != now:
            box = Box(center=box.center, half_extents=box.half_extents, spawn_time=now)
        self.world_box.put(world.spawn(box))
        self.log.record(EventKind.SPAWN, now, box=box_to_data(box))
        _log.debug("Spawned an obstacle at %s at t=%.3f", box.center, now)

    # region: Simulated clock

    async def run_simulated(self) -> None:
        settings = self.settings
        scheduler = EventScheduler(self.clock)

        def schedule_execution(step: int) -> None:
            async def action() -> None:
                await self.execution.tick()
                if self.execution.finished:
                    scheduler.stop()
                else:
                    schedule_execution(step + 1)

            scheduler.schedule(step * settings.execution_period, Priority.EXECUTION, action)

        def schedule_collision(step: int) -> None:
            async def action() -> None:
                await self.collision.tick()
                schedule_collision(step + 1)

            scheduler.schedule(step * settings.collision_period, Priority.COLLISION, action)

        def schedule_replan(instant: float) -> None:
            async def action() -> None:
                pending = await self.replanning.replan()
                if pending is None:
                    schedule_replan(instant + settings.replan_period)
                    return
                elapsed = pending.outcome.elapsed
                scheduler.schedule(instant + elapsed, Priority.REPLAN_DELIVERY, lambda: self.replanning.deliver(pending))
                schedule_replan(instant + max(elapsed, settings.replan_period))

            scheduler.schedule(instant, Priority.REPLAN_START, action)

        def schedule_spawn(spawn: ScheduledSpawn) -> None:
            async def action() -> None:
                await self.spawn(spawn)

            scheduler.schedule(spawn.time, Priority.WORLD, action)

        schedule_execution(1)
        schedule_collision(1)
        schedule_replan(0.0)
        for spawn in self.spawns:
            if spawn.time > settings.time_limit:
                _log.warning("Skipping the obstacle due at t=%.3f, after the episode time limit", spawn.time)
                continue
            schedule_spawn(spawn)

        await scheduler.run(settings.time_limit)

    # endregion

    # region: Wall clock

    async def _every(self, period: float, tick: Callable[[], Awaitable[None]], done: asyncio.Event) -> None:
        deadline = self.clock.now
        while not done.is_set():
            await tick()
            deadline += period
            await asyncio.sleep(max(0.0, deadline - self.clock.now))

    async def _execute(self, done: asyncio.Event) -> None:
        async def tick() -> None:
            await self.execution.tick()
            if self.execution.finished:
                done.set()

        await self._every(self.settings.execution_period, tick, done)

    async def _replan(self, done: asyncio.Event) -> None:
        while not done.is_set():
            started = self.clock.now
            pending = await self.replanning.replan(in_executor=True)
            if pending is not None and not done.is_set():
                await self.replanning.deliver(pending)
            await asyncio.sleep(max(0.0, started + self.settings.replan_period - self.clock.now))

    async def _spawn_at(self, spawn: ScheduledSpawn, done: asyncio.Event) -> None:
        await asyncio.sleep(max(0.0, spawn.time - self.clock.now))
        if not done.is_set():
            await self.spawn(spawn)

    async def run_wall(self) -> None:
        settings = self.settings
        done = asyncio.Event()
        tasks = [
            asyncio.create_task(self._execute(done)),
            asyncio.create_task(self._every(settings.collision_period, self.collision.tick, done)),
            asyncio.create_task(self._replan(done)),
        ]
        for spawn in self.spawns:
            if spawn.time > settings.time_limit:
                _log.warning("Skipping the obstacle due at t=%.3f, after the episode time limit", spawn.time)
                continue
            tasks.append(asyncio.create_task(self._spawn_at(spawn, done)))

        try:
            await asyncio.wait_for(done.wait(), timeout=settings.time_limit)
        except TimeoutError:
            pass
        finally:
            done.set()
            await asyncio.gather(*tasks)

    # endregion


async def run_episode(
    path_set: PathSet,
    world: CollisionWorld,
    settings: EpisodeSettings,
    *,
    spawns: Sequence[ScheduledSpawn] = (),
    rng: np.random.Generator,
    trial: int = 0,
) -> EpisodeLog:
    """Drives the robot along the current path while it is checked and re-planned.

    In simulated mode the three loops are stepped by a deterministic scheduler in virtual
    time and every re-plan takes the metered time it consumed. In wall mode they run as
    free-running tasks.

    Parameters
    ----------
    path_set : PathSet
        The pre-computed paths; the current one is executed.
    world : CollisionWorld
        The static obstacles, plus any scheduled moving ones.
    settings : EpisodeSettings
        The episode parameters.
    spawns : Sequence[ScheduledSpawn], optional
        Obstacles placed while the episode runs, by default none.
    rng : np.random.Generator
        The random generator shared by the planners and the spawners.
    trial : int, optional
        The trial number recorded in the log, by default 0.

    Returns
    -------
    EpisodeLog
        Every event and robot state of the episode.

    Raises
    ------
    ContractViolation
        A path of the set is flagged as obstructed.
    """
    if any(not path.is_feasible for path in path_set):
        raise ContractViolation("Every path of the set must be feasible when the episode starts.")

    episode = _Episode(path_set, world, settings, spawns, rng, trial)
    for service in episode.services:
        await service.start()

    try:
        if settings.clock_mode is ClockMode.WALL:
            await episode.run_wall()
        else:
            await episode.run_simulated()
    finally:
        for service in reversed(episode.services):
            await service.stop()

    log = episode.log
    if not episode.execution.finished:
        log.record(EventKind.TIMEOUT, episode.clock.now, stopped=episode.execution.stopped)
        _log.info("Trial %d timed out at t=%.3f", trial, episode.clock.now)
    return log
