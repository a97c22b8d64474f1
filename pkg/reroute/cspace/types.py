from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from ..errors import ContractViolation

__all__ = (
    "Configuration",
    "as_configuration",
    "Box",
    "WorldSnapshot",
    "CollisionWorld",
    "RobotKind",
    "Capsule",
    "RobotModel",
)


Configuration = npt.NDArray[np.float64]


def as_configuration(values: Iterable[float] | npt.ArrayLike, dimension: int | None = None) -> Configuration:
    """Converts values to a read-only configuration vector.

    Parameters
    ----------
    values : ArrayLike
        The coordinates.
    dimension : int | None, optional
        The expected dimension, if it should be checked.

    Returns
    -------
    Configuration
        A one-dimensional float64 array that cannot be written to.

    Raises
    ------
    ContractViolation
        The values are not a finite vector of the expected dimension.
    """
    q = np.array(values, dtype=np.float64)
    if q.ndim != 1:
        raise ContractViolation(f"A configuration must be a vector, got shape {q.shape}.")
    if dimension is not None and q.shape[0] != dimension:
        raise ContractViolation(f"Expected a configuration of dimension {dimension}, got {q.shape[0]}.")
    if not np.all(np.isfinite(q)):
        raise ContractViolation("Configuration coordinates must be finite.")
    q.setflags(write=False)
    return q


def _vector3(values: Sequence[float], name: str) -> tuple[float, float, float]:
    if len(values) != 3:
        raise ContractViolation(f"{name} must have three components, got {len(values)}.")
    x, y, z = (float(v) for v in values)
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise ContractViolation(f"{name} must be finite.")
    return x, y, z


@dataclass(frozen=True, slots=True)
class Box:
    """An axis-aligned box obstacle.

    Attributes
    ----------
    center : tuple[float, float, float]
        The centre of the box, in metres.
    half_extents : tuple[float, float, float]
        Half of the side lengths, in metres. Strictly positive.
    spawn_time : float | None
        When the box appears, in seconds. ``None`` for static boxes.
    """

    center: tuple[float, float, float]
    half_extents: tuple[float, float, float]
    spawn_time: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", _vector3(self.center, "center"))
        object.__setattr__(self, "half_extents", _vector3(self.half_extents, "half_extents"))
        if min(self.half_extents) <= 0:
            raise ContractViolation(f"Box half extents must be strictly positive, got {self.half_extents}.")
        if self.spawn_time is not None:
            if not math.isfinite(self.spawn_time) or self.spawn_time < 0:
                raise ContractViolation(f"Box spawn time must be non-negative, got {self.spawn_time}.")
            object.__setattr__(self, "spawn_time", float(self.spawn_time))

    @classmethod
    def cube(cls, center: Sequence[float], side: float, spawn_time: float | None = None) -> Box:
        """Creates a cube of the given side length."""
        half = side / 2
        return cls(center=tuple(center), half_extents=(half, half, half), spawn_time=spawn_time)  # type: ignore[arg-type]

    @property
    def is_static(self) -> bool:
        """bool: Whether the box is present from the start."""
        return self.spawn_time is None

    def active_at(self, time: float) -> bool:
        """Returns whether the box exists at ``time``."""
        return self.spawn_time is None or self.spawn_time <= time

    @property
    def lower(self) -> tuple[float, float, float]:
        """tuple[float, float, float]: The minimum corner."""
        return tuple(c - h for c, h in zip(self.center, self.half_extents))  # type: ignore[return-value]

    @property
    def upper(self) -> tuple[float, float, float]:
        """tuple[float, float, float]: The maximum corner."""
        return tuple(c + h for c, h in zip(self.center, self.half_extents))  # type: ignore[return-value]


@dataclass(frozen=True, slots=True)
class WorldSnapshot:
    """The obstacles present at one instant.

    Attributes
    ----------
    active_boxes : tuple[Box, ...]
        The static boxes plus every moving box spawned at or before ``snapshot_time``.
    snapshot_time : float
        The instant, in seconds.
    """

    active_boxes: tuple[Box, ...]
    snapshot_time: float
    _lower: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _upper: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "active_boxes", tuple(self.active_boxes))
        lower = np.array([box.lower for box in self.active_boxes], dtype=np.float64).reshape(-1, 3)
        upper = np.array([box.upper for box in self.active_boxes], dtype=np.float64).reshape(-1, 3)
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "_lower", lower)
        object.__setattr__(self, "_upper", upper)

    def bounds(self, margin: float = 0.0) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """Returns the ``(B, 3)`` minimum and maximum corners, grown by ``margin`` on every side."""
        if margin == 0.0:
            return self._lower, self._upper
        return self._lower - margin, self._upper + margin

    def __len__(self) -> int:
        return len(self.active_boxes)


@dataclass(frozen=True, slots=True)
class CollisionWorld:
    """Static boxes plus the append-only schedule of moving boxes.

    Attributes
    ----------
    static_boxes : tuple[Box, ...]
        Boxes present for the whole episode.
    moving_boxes : tuple[Box, ...]
        Boxes that appear at their spawn time and never leave.
    """

    static_boxes: tuple[Box, ...] = ()
    moving_boxes: tuple[Box, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "static_boxes", tuple(self.static_boxes))
        object.__setattr__(self, "moving_boxes", tuple(self.moving_boxes))
        if any(box.spawn_time is not None for box in self.static_boxes):
            raise ContractViolation("Static boxes cannot have a spawn time.")
        if any(box.spawn_time is None for box in self.moving_boxes):
            raise ContractViolation("Moving boxes must have a spawn time.")

    def snapshot(self, time: float) -> WorldSnapshot:
        """Returns the obstacles present at ``time``.

        Parameters
        ----------
        time : float
            The instant, in seconds.

        Returns
        -------
        WorldSnapshot
            An immutable snapshot.
        """
        active = self.static_boxes + tuple(box for box in self.moving_boxes if box.active_at(time))
        return WorldSnapshot(active_boxes=active, snapshot_time=time)

    def spawn(self, box: Box) -> CollisionWorld:
        """Returns a new world with ``box`` added to the moving boxes."""
        return CollisionWorld(static_boxes=self.static_boxes, moving_boxes=(*self.moving_boxes, box))


class RobotKind(Enum):
    """Represents the kind of robot geometry."""

    POINT = "point"
    SERIAL_CHAIN = "serial-chain"


class Capsule(NamedTuple):
    """A segment swept by a sphere, expressed in the frame it is attached to.

    Attributes
    ----------
    start : tuple[float, float, float]
        The first segment endpoint, in metres.
    end : tuple[float, float, float]
        The second segment endpoint, in metres.
    radius : float
        The sphere radius, in metres.
    """

    start: tuple[float, float, float]
    end: tuple[float, float, float]
    radius: float

    @property
    def length(self) -> float:
        """float: The segment length."""
        return math.dist(self.start, self.end)

    def sphere_cover(self) -> tuple[npt.NDArray[np.float64], float]:
        """Returns sphere centres covering the capsule and their common radius.

        Centres are spaced at most one radius apart along the segment, and the radius is
        grown by half the spacing so that the union of spheres contains the capsule.
        """
        count = max(2, math.ceil(self.length / self.radius) + 1)
        weights = np.linspace(0.0, 1.0, count)[:, None]
        centers = (1 - weights) * np.asarray(self.start) + weights * np.asarray(self.end)
        spacing = self.length / (count - 1)
        return centers, self.radius + spacing / 2


@dataclass(frozen=True, slots=True)
class RobotModel:
    """The geometry of the robot being planned for.

    A point robot is a configuration read as a position in metres. A serial chain has one
    revolute joint per dimension; joint ``j`` rotates about ``joint_axes[j]`` (expressed in the
    frame of link ``j - 1``), link ``j`` carries ``capsules[j]`` in its own frame, and
    ``link_offsets[j]`` locates joint ``j + 1`` in the frame of link ``j``.

    Attributes
    ----------
    kind : RobotKind
        The kind of geometry.
    dimension : int
        The configuration-space dimension.
    joint_axes : tuple[tuple[float, float, float], ...]
        Unit rotation axes, one per joint. Empty for a point robot.
    link_offsets : tuple[tuple[float, float, float], ...]
        Translation from each joint to the next, in the link frame.
    capsules : tuple[Capsule, ...]
        The collision geometry of each link.
    joint_lower : tuple[float, ...]
        Lower joint limits, in radians.
    joint_upper : tuple[float, ...]
        Upper joint limits, in radians.
    base : tuple[float, float, float]
        The position of the first joint in the world frame.
    """

    kind: RobotKind
    dimension: int
    joint_axes: tuple[tuple[float, float, float], ...] = ()
    link_offsets: tuple[tuple[float, float, float], ...] = ()
    capsules: tuple[Capsule, ...] = ()
    joint_lower: tuple[float, ...] = ()
    joint_upper: tuple[float, ...] = ()
    base: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.kind is RobotKind.POINT:
            if self.dimension != 3:
                raise ContractViolation("A point robot lives in a three-dimensional space.")
            if self.joint_axes or self.link_offsets or self.capsules:
                raise ContractViolation("A point robot has no links.")
            return

        d = self.dimension
        if not (len(self.joint_axes) == len(self.link_offsets) == len(self.capsules) == d):
            raise ContractViolation(f"A serial chain of dimension {d} needs exactly {d} joints, offsets and capsules.")
        if len(self.joint_lower) != d or len(self.joint_upper) != d:
            raise ContractViolation(f"A serial chain of dimension {d} needs {d} joint limits.")
        if any(lo >= hi for lo, hi in zip(self.joint_lower, self.joint_upper)):
            raise ContractViolation("Joint lower limits must be below upper limits.")
        if any(capsule.radius <= 0 for capsule in self.capsules):
            raise ContractViolation("Capsule radii must be strictly positive.")
        axes = []
        for axis in self.joint_axes:
            norm = math.hypot(*axis)
            if norm == 0:
                raise ContractViolation("Joint axes must be non-zero.")
            axes.append(tuple(a / norm for a in axis))
        object.__setattr__(self, "joint_axes", tuple(axes))

    @classmethod
    def point(cls) -> RobotModel:
        """Creates a point robot in three-dimensional space."""
        return cls(kind=RobotKind.POINT, dimension=3)

    @property
    def is_point(self) -> bool:
        """bool: Whether this is a point robot."""
        return self.kind is RobotKind.POINT

    @property
    def reach_radii(self) -> tuple[float, ...]:
        """tuple[float, ...]: For each joint, a bound on the distance from it to any downstream sphere centre."""
        radii = []
        for j in range(self.dimension if not self.is_point else 0):
            best = 0.0
            travelled = 0.0
            for k in range(j, self.dimension):
                capsule = self.capsules[k]
                extent = max(math.hypot(*capsule.start), math.hypot(*capsule.end))
                best = max(best, travelled + extent)
                travelled += math.hypot(*self.link_offsets[k])
            radii.append(best)
        return tuple(radii)

    @property
    def lipschitz(self) -> float:
        """float: A bound on workspace displacement per unit of configuration-space distance."""
        if self.is_point:
            return 1.0
        return math.hypot(*self.reach_radii)

    def sweep_margin(self, resolution: float) -> float:
        """Returns the obstacle inflation that makes checks at ``resolution`` sound for any finer resolution.

        Parameters
        ----------
        resolution : float
            The configuration-space check resolution.

        Returns
        -------
        float
            Half a resolution step, converted to workspace distance.
        """
        return resolution / 2 * self.lipschitz

    def within_limits(self, q: Configuration) -> bool:
        """Returns whether ``q`` respects the joint limits. Always true for a point robot."""
        if self.is_point:
            return True
        return bool(np.all(q >= np.asarray(self.joint_lower)) and np.all(q <= np.asarray(self.joint_upper)))

    def validate(self, q: Configuration) -> Configuration:
        """Checks that ``q`` is a valid configuration for this robot.

        Raises
        ------
        ContractViolation
            The dimension is wrong, a coordinate is not finite, or a joint limit is exceeded.
        """
        q = as_configuration(q, self.dimension)
        if not self.within_limits(q):
            raise ContractViolation(f"Configuration {q.tolist()} exceeds the joint limits.")
        return q
