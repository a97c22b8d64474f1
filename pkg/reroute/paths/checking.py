from __future__ import annotations

import numpy as np

from ..cspace import DEFAULT_RESOLUTION, CollisionChecker, RobotModel, WorldSnapshot, configs_in_collision, segment_samples
from ..timing import Stopwatch
from .types import CollisionReport, Path

__all__ = (
    "check_path",
    "check_path_with",
    "colliding_edges",
    "recheck_path",
)


def colliding_edges(path: Path, checker: CollisionChecker) -> tuple[int, ...]:
    """Returns the index of every edge of ``path`` with a sampled configuration in collision.

    All edges are sampled in one batch and the checker is charged for every sample.
    """
    if path.edge_count == 0:
        return ()

    batches = [segment_samples(path.waypoints[edge], path.waypoints[edge + 1], checker.resolution) for edge in range(path.edge_count)]
    owners = np.repeat(np.arange(path.edge_count), [batch.shape[0] for batch in batches])
    samples = np.concatenate(batches, axis=0)
    checker.charge(samples.shape[0])
    hits = configs_in_collision(samples, checker.world, checker.robot, margin=checker.margin)
    return tuple(int(edge) for edge in np.unique(owners[hits]))


def check_path_with(path: Path, checker: CollisionChecker) -> CollisionReport:
    """Checks every edge of ``path`` with ``checker``.

    Parameters
    ----------
    path : Path
        The path to check.
    checker : CollisionChecker
        The collision checker to use.

    Returns
    -------
    CollisionReport
        A free report, or an obstructed one whose ``x_before`` is the source node of the first
        colliding edge and whose ``x_after`` is the destination node of the last colliding edge.
    """
    checked_at = checker.world.snapshot_time
    edges = colliding_edges(path, checker)
    if not edges:
        return CollisionReport.free(checked_at)
    return CollisionReport(
        obstructed=True,
        x_before=path.node(edges[0]),
        x_after=path.node(edges[-1] + 1),
        checked_at=checked_at,
        blocked_edges=edges,
    )


def check_path(
    path: Path,
    world: WorldSnapshot,
    robot: RobotModel,
    resolution: float = DEFAULT_RESOLUTION,
    *,
    margin: float | None = None,
    stopwatch: Stopwatch | None = None,
) -> CollisionReport:
    """Checks every edge of ``path`` against ``world``.

    ``margin`` defaults to the robot's sweep margin at ``resolution``; see :class:`CollisionChecker`.
    """
    return check_path_with(path, CollisionChecker(world, robot, resolution, margin=margin, stopwatch=stopwatch))


def recheck_path(path: Path, world: WorldSnapshot, robot: RobotModel, resolution: float = DEFAULT_RESOLUTION / 2) -> bool:
    """Independently re-checks a path edge by edge against the exact boxes.

    Returns
    -------
    bool
        Whether every sampled configuration of every edge is clear.
    """
    if path.edge_count == 0:
        return not configs_in_collision(path.waypoints, world, robot).any()
    for edge in range(path.edge_count):
        samples = segment_samples(path.waypoints[edge], path.waypoints[edge + 1], resolution)
        if configs_in_collision(samples, world, robot).any():
            return False
    return True
