from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from ..cspace import Box, Configuration, tip_position
from ..executor import ScheduledSpawn, SpawnContext, Spawner
from ..paths import project_on_path
from .scenario import Placement, Scenario, SpawnSpec

__all__ = (
    "RandomEdgeSpawner",
    "OccupiedEdgeSpawner",
    "FixedSpawner",
    "build_spawns",
)


_log = logging.getLogger(__name__)


MAX_PLACEMENT_ATTEMPTS = 16


class RandomEdgeSpawner:
    """Places a cube on a uniformly chosen point of a uniformly chosen edge of the remaining current path.

    Points whose cube would swallow the robot or the goal are redrawn.
    """

    def __init__(self, side: float) -> None:
        self.side: float = side

    def __call__(self, context: SpawnContext) -> Box | None:
        current = context.path_set.current.cleared()
        projection = project_on_path(np.asarray(context.state.config), current)
        remainder = projection.path.slice(projection.index, len(projection.path) - 1)
        if remainder.edge_count == 0:
            return None

        robot_tip = tip_position(np.asarray(context.state.config), context.robot)
        goal_tip = tip_position(remainder.goal.array, context.robot)
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            edge = int(context.rng.integers(remainder.edge_count))
            s = float(context.rng.random())
            q = (1 - s) * remainder.waypoints[edge] + s * remainder.waypoints[edge + 1]
            center = tip_position(q, context.robot)
            if _clear_of(center, self.side, robot_tip) and _clear_of(center, self.side, goal_tip):
                return Box.cube(center, self.side, context.time)
        _log.debug("No random-edge placement clear of the robot and the goal at t=%.3f", context.time)
        return None


class OccupiedEdgeSpawner:
    """Places a cube on the edge the robot is crossing, ``lead`` ahead of it along the edge."""

    def __init__(self, side: float, lead: float) -> None:
        self.side: float = side
        self.lead: float = lead

    def __call__(self, context: SpawnContext) -> Box | None:
        current = context.path_set.current.cleared()
        q = np.asarray(context.state.config)
        projection = project_on_path(q, current)
        path = projection.path
        if projection.index >= len(path) - 1:
            return None

        # The projection is a waypoint of the inserted path; the edge after it is the one being crossed.
        a, b = path.waypoints[projection.index], path.waypoints[projection.index + 1]
        length = float(np.linalg.norm(b - a))
        point = a + min(self.lead, length) / length * (b - a)
        center = tip_position(point, context.robot)
        if not _clear_of(center, self.side, tip_position(current.goal.array, context.robot)):
            return None
        return Box.cube(center, self.side, context.time)


class FixedSpawner:
    """Places a cube at a fixed centre."""

    def __init__(self, side: float, center: Sequence[float]) -> None:
        self.side: float = side
        self.center: tuple[float, ...] = tuple(center)

    def __call__(self, context: SpawnContext) -> Box | None:
        return Box.cube(self.center, self.side, context.time)


def _clear_of(center: Configuration, side: float, point: Configuration) -> bool:
    return bool(np.max(np.abs(center - point)) > side)


def _spawner_for(spec: SpawnSpec, scenario: Scenario) -> Spawner:
    match spec.placement:
        case Placement.RANDOM_EDGE:
            return RandomEdgeSpawner(spec.side)
        case Placement.OCCUPIED_EDGE:
            return OccupiedEdgeSpawner(spec.side, scenario.spawn_lead)
        case Placement.FIXED:
            assert spec.center is not None
            return FixedSpawner(spec.side, spec.center)


def build_spawns(scenario: Scenario, rng: np.random.Generator) -> list[ScheduledSpawn]:
    """Builds one trial's spawn schedule.

    When the scenario asks for it, one random-edge entry, picked with ``rng``, is placed on the
    edge the robot is crossing instead.
    """
    specs = list(scenario.spawns)
    if scenario.occupied_edge_auto:
        candidates = [index for index, spec in enumerate(specs) if spec.placement is Placement.RANDOM_EDGE]
        chosen = candidates[int(rng.integers(len(candidates)))]
        specs[chosen] = SpawnSpec(specs[chosen].time, specs[chosen].side, Placement.OCCUPIED_EDGE)
        _log.debug("The spawn at t=%.3f obstructs the occupied edge", specs[chosen].time)
    return [ScheduledSpawn(spec.time, _spawner_for(spec, scenario)) for spec in specs]
