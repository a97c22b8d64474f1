from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property
from typing import NamedTuple, Self

import numpy as np
import numpy.typing as npt

from ..cspace import Configuration
from ..errors import ContractViolation

__all__ = (
    "EPS_MERGE",
    "INFINITE_COST",
    "NODE_TOLERANCE",
    "extended_sum",
    "Node",
    "Path",
    "CollisionReport",
    "PathSet",
)


EPS_MERGE = 0.05
INFINITE_COST = math.inf
NODE_TOLERANCE = 1e-9


def extended_sum(*costs: float) -> float:
    """Adds costs with +inf absorbing."""
    total = 0.0
    for cost in costs:
        if math.isinf(cost):
            return INFINITE_COST
        total += cost
    return total


class Node(NamedTuple):
    """A waypoint, identified by its coordinates.

    Attributes
    ----------
    config : tuple[float, ...]
        The configuration of the waypoint.
    """

    config: tuple[float, ...]

    @classmethod
    def of(cls, q: Configuration | Sequence[float]) -> Self:
        """Creates a node from a configuration."""
        return cls(tuple(float(v) for v in q))

    @property
    def array(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The configuration as an array."""
        return np.asarray(self.config, dtype=np.float64)

    def distance_to(self, other: Node | Configuration) -> float:
        """Returns the Euclidean distance to another node or configuration."""
        other_config = other.config if isinstance(other, Node) else other
        return math.dist(self.config, tuple(other_config))


class Path:
    """An ordered waypoint sequence with per-edge obstruction flags.

    Paths are values: every operation returns a new path and never changes this one.
    Edge ``k`` joins waypoints ``k`` and ``k + 1``. The cost of a path is its length
    when no edge is flagged, and +inf otherwise.

    Attributes
    ----------
    waypoints : npt.NDArray[np.float64]
        The waypoints, shape ``(M, d)``. Read-only.
    blocked : frozenset[int]
        Indices of the edges found in collision by the latest check.
    """

    def __init__(self, waypoints: npt.ArrayLike, blocked: Iterable[int] = ()) -> None:
        """Initializes the path.

        Parameters
        ----------
        waypoints : ArrayLike
            At least one waypoint; exact consecutive duplicates are dropped.
        blocked : Iterable[int], optional
            Obstructed edge indices, by default none.

        Raises
        ------
        ContractViolation
            The waypoints are not a non-empty finite ``(M, d)`` array, or a flag names a missing edge.
        """
        points = np.array(waypoints, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ContractViolation(f"A path needs a (M, d) waypoint array, got shape {points.shape}.")
        if not np.all(np.isfinite(points)):
            raise ContractViolation("Path waypoints must be finite.")

        blocked = frozenset(int(edge) for edge in blocked)
        if any(edge < 0 or edge >= points.shape[0] - 1 for edge in blocked):
            raise ContractViolation(f"Blocked edges {sorted(blocked)} do not exist on a path of {points.shape[0]} nodes.")

        if points.shape[0] > 1:
            keep = np.ones(points.shape[0], dtype=bool)
            keep[1:] = np.any(points[1:] != points[:-1], axis=1)
            if not keep.all():
                # Re-index flags onto the surviving edges.
                survivors = np.flatnonzero(keep)
                remap = np.cumsum(keep) - 1
                blocked = frozenset(int(remap[edge]) for edge in blocked if keep[edge + 1])
                points = points[survivors]

        points.setflags(write=False)
        self.waypoints: npt.NDArray[np.float64] = points
        self.blocked: frozenset[int] = blocked

    # region: Accessors

    def __len__(self) -> int:
        return self.waypoints.shape[0]

    def __repr__(self) -> str:
        return f"<Path nodes={len(self)} length={self.length:.4f} cost={self.cost}>"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Path):
            return NotImplemented
        return self.blocked == other.blocked and np.array_equal(self.waypoints, other.waypoints)

    def __hash__(self) -> int:
        return hash((self.waypoints.tobytes(), self.blocked))

    @property
    def dimension(self) -> int:
        """int: The configuration-space dimension."""
        return self.waypoints.shape[1]

    @property
    def edge_count(self) -> int:
        """int: The number of edges."""
        return len(self) - 1

    @property
    def start(self) -> Node:
        """Node: The first waypoint."""
        return Node.of(self.waypoints[0])

    @property
    def goal(self) -> Node:
        """Node: The last waypoint."""
        return Node.of(self.waypoints[-1])

    @cached_property
    def nodes(self) -> tuple[Node, ...]:
        """tuple[Node, ...]: The waypoints as nodes."""
        return tuple(Node.of(point) for point in self.waypoints)

    def node(self, index: int) -> Node:
        """Returns the waypoint at ``index``."""
        return self.nodes[index]

    @cached_property
    def edge_lengths(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The Euclidean length of every edge."""
        return np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1)

    @cached_property
    def arc_lengths(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The arc length at every waypoint, starting from zero."""
        return np.concatenate(([0.0], np.cumsum(self.edge_lengths)))

    @property
    def length(self) -> float:
        """float: The geometric length, regardless of obstruction flags."""
        return float(self.arc_lengths[-1])

    @property
    def is_feasible(self) -> bool:
        """bool: Whether no edge is flagged as obstructed."""
        return not self.blocked

    @property
    def cost(self) -> float:
        """float: The length when feasible, +inf when any edge is obstructed."""
        return self.length if self.is_feasible else INFINITE_COST

    @cached_property
    def suffix_costs(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: For every waypoint ``k``, the cost of the path from ``k`` to the goal."""
        costs = self.length - self.arc_lengths
        for edge in self.blocked:
            costs[: edge + 1] = INFINITE_COST
        costs[-1] = 0.0
        return costs

    # endregion

    # region: Node lookup

    def index_of(self, node: Node | Configuration, *, start: int = 0, tolerance: float = NODE_TOLERANCE) -> int | None:
        """Finds a waypoint.

        Parameters
        ----------
        node : Node | Configuration
            The waypoint to look for.
        start : int, optional
            The first index to consider, by default 0.
        tolerance : float, optional
            The largest distance at which a waypoint matches.

        Returns
        -------
        int | None
            The first matching index at or after ``start``, or None.
        """
        target = node.array if isinstance(node, Node) else np.asarray(node, dtype=np.float64)
        if target.shape != (self.dimension,):
            raise ContractViolation(f"Expected a node of dimension {self.dimension}, got shape {target.shape}.")
        distances = np.linalg.norm(self.waypoints[start:] - target, axis=1)
        matches = np.flatnonzero(distances <= tolerance)
        if matches.size == 0:
            return None
        return int(matches[0]) + start

    def locate(self, point: Node | Configuration, *, start: int = 0, tolerance: float = NODE_TOLERANCE) -> tuple[int, float] | None:
        """Finds the first edge at or after waypoint ``start`` passing through ``point``.

        Returns
        -------
        tuple[int, float] | None
            The edge index and the fraction along it, or None when the point is not on the path.
        """
        p = point.array if isinstance(point, Node) else np.asarray(point, dtype=np.float64)
        for edge in range(start, self.edge_count):
            a = self.waypoints[edge]
            ab = self.waypoints[edge + 1] - a
            denominator = float(ab @ ab)
            t = 0.0 if denominator == 0.0 else float(np.clip((p - a) @ ab / denominator, 0.0, 1.0))
            if np.linalg.norm(a + t * ab - p) <= tolerance:
                return edge, t
        return None

    def insert(self, point: Node | Configuration, *, start: int = 0, tolerance: float = NODE_TOLERANCE) -> tuple[Path, int]:
        """Makes ``point`` a waypoint of the path.

        Parameters
        ----------
        point : Node | Configuration
            A point lying on the path.
        start : int, optional
            The first waypoint index to search from.

        Returns
        -------
        tuple[Path, int]
            The path containing the point as a waypoint, and its index.

        Raises
        ------
        ContractViolation
            The point does not lie on the path.
        """
        index = self.index_of(point, start=start, tolerance=tolerance)
        if index is not None:
            return self, index

        located = self.locate(point, start=start, tolerance=tolerance)
        if located is None:
            raise ContractViolation("The point does not lie on the path.")
        edge, _ = located
        p = point.array if isinstance(point, Node) else np.asarray(point, dtype=np.float64)
        waypoints = np.insert(self.waypoints, edge + 1, p, axis=0)
        blocked = {e if e < edge else e + 1 for e in self.blocked}
        if edge in self.blocked:
            blocked |= {edge, edge + 1}
        return Path(waypoints, blocked), edge + 1

    # endregion

    # region: Algebra

    def slice(self, first: int, last: int) -> Path:
        """Returns the waypoints ``first..last`` (inclusive) with their edge flags."""
        if not 0 <= first <= last < len(self):
            raise ContractViolation(f"Invalid waypoint range [{first}, {last}] on a path of {len(self)} nodes.")
        blocked = {edge - first for edge in self.blocked if first <= edge < last}
        return Path(self.waypoints[first : last + 1], blocked)

    def subpath(self, start: Node | Configuration, end: Node | Configuration) -> Path:
        """Returns the portion of the path between two points on it.

        Points lying on an edge are inserted as waypoints first.

        Parameters
        ----------
        start : Node | Configuration
            The first point.
        end : Node | Configuration
            The last point, at or after ``start`` along the path.

        Returns
        -------
        Path
            The sub-path; a single-node path when ``start`` equals ``end``.

        Raises
        ------
        ContractViolation
            Either point is not on the path, or ``end`` precedes ``start``.
        """
        path, first = self.insert(start)
        try:
            path, last = path.insert(end, start=first)
        except ContractViolation:
            raise ContractViolation("The end point is not on the path at or after the start point.") from None
        return path.slice(first, last)

    def concat(self, other: Path, *, tolerance: float = EPS_MERGE) -> Path:
        """Appends ``other`` to this path.

        The junction appears once, taken from this path.

        Raises
        ------
        ContractViolation
            The last node of this path is not within ``tolerance`` of the first node of ``other``.
        """
        if other.dimension != self.dimension:
            raise ContractViolation(f"Cannot join paths of dimensions {self.dimension} and {other.dimension}.")
        gap = float(np.linalg.norm(self.waypoints[-1] - other.waypoints[0]))
        if gap > tolerance:
            raise ContractViolation(f"Paths do not meet: the junction gap is {gap:.6g}.")
        waypoints = np.concatenate((self.waypoints, other.waypoints[1:]), axis=0)
        offset = self.edge_count
        blocked = set(self.blocked) | {edge + offset for edge in other.blocked}
        return Path(waypoints, blocked)

    def reversed(self) -> Path:
        """Returns the path travelled backwards."""
        last = self.edge_count - 1
        return Path(self.waypoints[::-1], {last - edge for edge in self.blocked})

    def with_blocked(self, edges: Iterable[int]) -> Path:
        """Returns the same waypoints flagged with ``edges``."""
        return Path(self.waypoints, edges)

    def with_report(self, report: CollisionReport) -> Path:
        """Returns the same waypoints flagged according to a collision report of this path."""
        return Path(self.waypoints, report.blocked_edges)

    def cleared(self) -> Path:
        """Returns the same waypoints with no obstruction flags."""
        return self if not self.blocked else Path(self.waypoints)

    # endregion

    # region: Arc-length parameterization

    def point_at(self, arc: float) -> npt.NDArray[np.float64]:
        """Returns the point at arc length ``arc``, clamped to the path ends."""
        if arc <= 0.0 or len(self) == 1:
            return self.waypoints[0].copy()
        if arc >= self.length:
            return self.waypoints[-1].copy()
        edge = int(np.searchsorted(self.arc_lengths, arc, side="right")) - 1
        edge = min(edge, self.edge_count - 1)
        span = self.edge_lengths[edge]
        fraction = 0.0 if span == 0.0 else (arc - self.arc_lengths[edge]) / span
        a = self.waypoints[edge]
        return a + fraction * (self.waypoints[edge + 1] - a)

    # endregion


class CollisionReport(NamedTuple):
    """The verdict of checking one path against one snapshot.

    Attributes
    ----------
    obstructed : bool
        Whether any edge collides.
    x_before : Node | None
        The source node of the first colliding edge.
    x_after : Node | None
        The destination node of the last colliding edge; the rest of the path is clear.
    checked_at : float
        The snapshot time, in seconds.
    blocked_edges : tuple[int, ...]
        Every colliding edge index, ascending.
    """

    obstructed: bool
    x_before: Node | None
    x_after: Node | None
    checked_at: float
    blocked_edges: tuple[int, ...] = ()

    @classmethod
    def free(cls, checked_at: float) -> Self:
        """Creates a report for a path with no collision."""
        return cls(obstructed=False, x_before=None, x_after=None, checked_at=checked_at)

    @property
    def before_index(self) -> int | None:
        """int | None: The waypoint index of ``x_before``."""
        return self.blocked_edges[0] if self.blocked_edges else None

    @property
    def after_index(self) -> int | None:
        """int | None: The waypoint index of ``x_after``."""
        return self.blocked_edges[-1] + 1 if self.blocked_edges else None


class PathSet:
    """The pre-computed paths available to the re-planner, and the one being executed.

    Attributes
    ----------
    paths : tuple[Path, ...]
        The paths; all end at the same goal.
    current_index : int
        The index of the path being executed.
    """

    __slots__ = ("paths", "current_index")

    def __init__(self, paths: Iterable[Path], current_index: int = 0) -> None:
        paths = tuple(paths)
        if not paths:
            raise ContractViolation("A path set needs at least one path.")
        if not 0 <= current_index < len(paths):
            raise ContractViolation(f"Current index {current_index} is out of range for {len(paths)} paths.")
        goal = paths[0].waypoints[-1]
        for path in paths[1:]:
            if path.dimension != paths[0].dimension or np.linalg.norm(path.waypoints[-1] - goal) > NODE_TOLERANCE:
                raise ContractViolation("All paths of a set must end at the same goal.")
        self.paths: tuple[Path, ...] = paths
        self.current_index: int = current_index

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)

    def __getitem__(self, index: int) -> Path:
        return self.paths[index]

    def __repr__(self) -> str:
        return f"<PathSet paths={len(self.paths)} current={self.current_index}>"

    @property
    def goal(self) -> Node:
        """Node: The goal shared by every path."""
        return self.paths[0].goal

    @property
    def current(self) -> Path:
        """Path: The path being executed."""
        return self.paths[self.current_index]

    def others(self) -> list[Path]:
        """Returns every path except the current one."""
        return [path for index, path in enumerate(self.paths) if index != self.current_index]

    def replace(self, index: int, path: Path) -> PathSet:
        """Returns a set with the path at ``index`` replaced."""
        paths = list(self.paths)
        paths[index] = path
        return PathSet(paths, self.current_index)

    def with_current(self, path: Path) -> PathSet:
        """Returns a set where the current path is replaced by ``path``."""
        return self.replace(self.current_index, path)

    def with_flags(self, reports: Sequence[CollisionReport | None]) -> PathSet:
        """Returns a set whose paths are flagged by one report each (``None`` keeps the path as is)."""
        if len(reports) != len(self.paths):
            raise ContractViolation("Expected one report per path.")
        paths = [path if report is None else path.with_report(report) for path, report in zip(self.paths, reports)]
        return PathSet(paths, self.current_index)
