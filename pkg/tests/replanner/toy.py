from __future__ import annotations

import numpy as np

from reroute.cspace import Box, CollisionChecker, CollisionWorld, RobotModel
from reroute.paths import Path, PathSet, check_path
from reroute.planners import ConnectorSettings, SamplingBounds
from reroute.replanner import PlanningContext
from reroute.timing import MeteredStopwatch

START = (0.0, 0.0, 0.0)
GOAL = (1.0, 0.0, 0.0)
TOY_BOUNDS = SamplingBounds([-0.2, -0.7, -0.3], [1.2, 0.7, 0.3])


def make_context(world: CollisionWorld, robot: RobotModel, rng: np.random.Generator, *, merge_threshold: float = 0.0) -> PlanningContext:
    stopwatch = MeteredStopwatch(check_cost=1e-5, iteration_cost=5e-5)
    return PlanningContext(
        checker=CollisionChecker(world.snapshot(0.0), robot, 0.01, stopwatch=stopwatch),
        bounds=TOY_BOUNDS,
        rng=rng,
        stopwatch=stopwatch,
        connector=ConnectorSettings(step=0.05, max_iterations=500),
        merge_threshold=merge_threshold,
    )


def random_path(rng: np.random.Generator, world: CollisionWorld, robot: RobotModel) -> Path:
    """A path of two to six nodes from the toy start to the toy goal, with free intermediate nodes."""
    snapshot = world.snapshot(0.0)
    checker = CollisionChecker(snapshot, robot, 0.01)
    middle = []
    for _ in range(int(rng.integers(0, 5))):
        while True:
            q = rng.uniform([0.05, -0.5, -0.1], [0.95, 0.5, 0.1])
            if checker.config_free(q):
                middle.append(q)
                break
    middle.sort(key=lambda q: q[0])
    return Path([START, *middle, GOAL])


def random_world(rng: np.random.Generator, boxes: int) -> CollisionWorld:
    cubes = []
    for _ in range(boxes):
        cubes.append(Box.cube(rng.uniform([0.2, -0.4, -0.05], [0.8, 0.4, 0.05]), float(rng.uniform(0.05, 0.15))))
    return CollisionWorld(static_boxes=tuple(cubes))


def flagged(path_set: PathSet, world: CollisionWorld, robot: RobotModel) -> PathSet:
    return PathSet([path.with_report(check_path(path, world.snapshot(0.0), robot)) for path in path_set], path_set.current_index)
