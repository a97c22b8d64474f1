from __future__ import annotations

import numpy as np

from ..cspace import CollisionChecker
from ..paths import Path

__all__ = ("shortcut",)


def shortcut(path: Path, checker: CollisionChecker, rng: np.random.Generator | None = None, *, attempts: int = 0) -> Path:
    """Removes waypoints that a free straight edge can skip.

    A greedy pass joins every kept waypoint to the farthest later waypoint it can see. Then
    ``attempts`` random pairs of waypoints are tried. Skipping waypoints never lengthens a
    path, and the endpoints are kept.

    Parameters
    ----------
    path : Path
        A feasible path.
    checker : CollisionChecker
        The collision checker.
    rng : np.random.Generator | None, optional
        The random generator for the random pass.
    attempts : int, optional
        The number of random pairs to try, by default 0.

    Returns
    -------
    Path
        The shortened path, or ``path`` itself when it is obstructed or already minimal.
    """
    if not path.is_feasible or len(path) < 3:
        return path

    points = path.waypoints
    kept = [0]
    i = 0
    last = len(points) - 1
    while i < last:
        j = last
        while j > i + 1 and not checker.segment_free(points[i], points[j]):
            j -= 1
        kept.append(j)
        i = j
    waypoints = points[kept]

    if rng is not None:
        for _ in range(attempts):
            if waypoints.shape[0] < 3:
                break
            i, j = np.sort(rng.choice(waypoints.shape[0], 2, replace=False))
            if j - i <= 1:
                continue
            if checker.segment_free(waypoints[i], waypoints[j]):
                waypoints = np.concatenate((waypoints[: i + 1], waypoints[j:]), axis=0)

    if waypoints.shape[0] == len(points):
        return path
    return Path(waypoints)
