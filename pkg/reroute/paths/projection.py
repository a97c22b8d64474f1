from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..cspace import Configuration
from ..errors import ContractViolation
from .types import NODE_TOLERANCE, Node, Path

__all__ = (
    "Projection",
    "project_on_path",
    "PathProjector",
)


class Projection(NamedTuple):
    """The closest point of a path to a configuration.

    Attributes
    ----------
    node : Node
        The closest point.
    arc : float
        Its arc length along the path.
    path : Path
        The path with ``node`` inserted as a waypoint.
    index : int
        The waypoint index of ``node`` in ``path``.
    distance : float
        The distance from the configuration to ``node``.
    """

    node: Node
    arc: float
    path: Path
    index: int
    distance: float


def project_on_path(state: Configuration, path: Path, *, min_arc: float = 0.0) -> Projection:
    """Finds the point of ``path`` closest to ``state`` at or after arc length ``min_arc``.

    Ties between edges go to the earlier edge, so the projection never jumps ahead to a
    later pass of a path that comes back on itself.

    Parameters
    ----------
    state : Configuration
        The configuration to project.
    path : Path
        A non-empty path.
    min_arc : float, optional
        The smallest admissible arc length, by default 0.

    Returns
    -------
    Projection
        The closest point, inserted into the path as a waypoint if needed.
    """
    q = np.asarray(state, dtype=np.float64)
    if q.shape != (path.dimension,):
        raise ContractViolation(f"Expected a state of dimension {path.dimension}, got shape {q.shape}.")
    min_arc = min(max(0.0, min_arc), path.length)

    if len(path) == 1:
        node = path.node(0)
        return Projection(node=node, arc=0.0, path=path, index=0, distance=node.distance_to(q))

    a = path.waypoints[:-1]
    ab = np.diff(path.waypoints, axis=0)
    lengths = path.edge_lengths
    squared = lengths * lengths
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(squared > 0, np.einsum("ij,ij->i", q - a, ab) / squared, 0.0)

    # Restrict to arc lengths at or after min_arc.
    t_min = np.where(lengths > 0, (min_arc - path.arc_lengths[:-1]) / np.where(lengths > 0, lengths, 1.0), 0.0)
    t = np.clip(np.maximum(t, t_min), 0.0, 1.0)
    reachable = path.arc_lengths[1:] >= min_arc
    closest = a + t[:, None] * ab
    distances = np.linalg.norm(closest - q, axis=1)
    distances[~reachable] = np.inf

    edge = int(np.argmin(distances))  # argmin keeps the first of equal minima
    point = closest[edge]
    arc = float(path.arc_lengths[edge] + t[edge] * lengths[edge])

    if t[edge] == 0.0:
        return Projection(node=path.node(edge), arc=arc, path=path, index=edge, distance=float(distances[edge]))
    if t[edge] == 1.0:
        return Projection(node=path.node(edge + 1), arc=arc, path=path, index=edge + 1, distance=float(distances[edge]))

    inserted, index = path.insert(point, start=edge, tolerance=max(NODE_TOLERANCE, 1e-12 * (1.0 + path.length)))
    return Projection(node=inserted.node(index), arc=arc, path=inserted, index=index, distance=float(distances[edge]))


class PathProjector:
    """Projects successive robot states onto a path without ever moving backwards.

    Attributes
    ----------
    path : Path
        The path states are projected onto.
    arc : float
        The arc length of the latest projection.
    """

    def __init__(self, path: Path) -> None:
        self.path: Path = path
        self.arc: float = 0.0

    def reset(self, path: Path, arc: float = 0.0) -> None:
        """Starts tracking a new path from arc length ``arc``."""
        self.path = path
        self.arc = arc

    def project(self, state: Configuration) -> Projection:
        """Projects ``state``, at or after the previous projection."""
        projection = project_on_path(state, self.path, min_arc=self.arc)
        self.arc = projection.arc
        return projection
