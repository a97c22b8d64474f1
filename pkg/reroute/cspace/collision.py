from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from ..errors import ContractViolation
from ..timing import Stopwatch
from .kinematics import sphere_centers
from .types import Configuration, RobotModel, WorldSnapshot

__all__ = (
    "DEFAULT_RESOLUTION",
    "configs_in_collision",
    "config_in_collision",
    "segment_samples",
    "segment_in_collision",
    "CollisionChecker",
)


DEFAULT_RESOLUTION = 0.01


def configs_in_collision(
    qs: npt.NDArray[np.float64],
    world: WorldSnapshot,
    robot: RobotModel,
    *,
    margin: float = 0.0,
) -> npt.NDArray[np.bool_]:
    """Checks a batch of configurations against the active boxes.

    Boundary contact counts as collision.

    Parameters
    ----------
    qs : npt.NDArray[np.float64]
        Configurations, shape ``(n, d)``.
    world : WorldSnapshot
        The obstacles.
    robot : RobotModel
        The robot geometry.
    margin : float, optional
        Distance every box is grown by on each side, by default 0.

    Returns
    -------
    npt.NDArray[np.bool_]
        One flag per configuration.
    """
    qs = np.atleast_2d(np.asarray(qs, dtype=np.float64))
    if qs.shape[1] != robot.dimension:
        raise ContractViolation(f"Expected configurations of dimension {robot.dimension}, got {qs.shape[1]}.")
    if len(world) == 0:
        return np.zeros(qs.shape[0], dtype=bool)

    lower, upper = world.bounds(margin)
    centers, radii = sphere_centers(qs, robot)
    c = centers[:, :, None, :]
    excess = np.maximum(np.maximum(lower - c, c - upper), 0.0)
    hit = np.einsum("nsbk,nsbk->nsb", excess, excess) <= (radii * radii)[None, :, None]
    return hit.any(axis=(1, 2))


def config_in_collision(q: Configuration, world: WorldSnapshot, robot: RobotModel, *, margin: float = 0.0) -> bool:
    """Returns whether the robot at ``q`` touches any active box."""
    return bool(configs_in_collision(np.asarray(q)[None, :], world, robot, margin=margin)[0])


def segment_samples(a: Configuration, b: Configuration, resolution: float) -> npt.NDArray[np.float64]:
    """Returns the configurations checked along the segment from ``a`` to ``b``.

    Samples sit at arc lengths ``k * resolution`` for ``k = 0 .. ceil(L / resolution)``, clamped to
    the far endpoint, measured from the lexicographically smaller endpoint. The set therefore does
    not depend on the direction of the segment, and halving the resolution only adds samples.

    Parameters
    ----------
    a : Configuration
        One endpoint.
    b : Configuration
        The other endpoint.
    resolution : float
        The maximum spacing between samples.

    Returns
    -------
    npt.NDArray[np.float64]
        Samples of shape ``(k, d)``, both endpoints included.
    """
    if resolution <= 0:
        raise ContractViolation(f"Check resolution must be positive, got {resolution}.")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractViolation(f"Configuration dimensions differ: {a.shape} and {b.shape}.")
    if tuple(b) < tuple(a):
        a, b = b, a
    length = float(np.linalg.norm(b - a))
    if length == 0.0:
        return a[None, :].copy()
    steps = math.ceil(length / resolution)
    s = np.minimum(np.arange(steps + 1) * (resolution / length), 1.0)
    s[-1] = 1.0
    return a + s[:, None] * (b - a)


def segment_in_collision(
    a: Configuration,
    b: Configuration,
    world: WorldSnapshot,
    robot: RobotModel,
    resolution: float = DEFAULT_RESOLUTION,
    *,
    margin: float = 0.0,
) -> bool:
    """Returns whether any sampled configuration of the segment is in collision.

    See :func:`segment_samples` for where samples are taken.
    """
    return bool(configs_in_collision(segment_samples(a, b, resolution), world, robot, margin=margin).any())


class CollisionChecker:
    """Collision queries bound to one snapshot, robot and resolution.

    Planners and the collision loop use a checker built with the robot's sweep margin,
    which keeps their verdicts valid for any finer re-check. Each query charges the
    attached stopwatch for the configurations it examines.

    Attributes
    ----------
    world : WorldSnapshot
        The obstacles.
    robot : RobotModel
        The robot geometry.
    resolution : float
        The segment check resolution.
    margin : float
        Distance every box is grown by.
    stopwatch : Stopwatch | None
        The stopwatch charged for checks, if any.
    """

    def __init__(
        self,
        world: WorldSnapshot,
        robot: RobotModel,
        resolution: float = DEFAULT_RESOLUTION,
        *,
        margin: float | None = None,
        stopwatch: Stopwatch | None = None,
    ) -> None:
        """Initializes the checker.

        Parameters
        ----------
        world : WorldSnapshot
            The obstacles.
        robot : RobotModel
            The robot geometry.
        resolution : float, optional
            The segment check resolution, by default 0.01.
        margin : float | None, optional
            Box growth; defaults to the robot's sweep margin at ``resolution``.
        stopwatch : Stopwatch | None, optional
            A stopwatch to charge for checks.
        """
        self.world: WorldSnapshot = world
        self.robot: RobotModel = robot
        self.resolution: float = resolution
        self.margin: float = robot.sweep_margin(resolution) if margin is None else margin
        self.stopwatch: Stopwatch | None = stopwatch
        self.checks: int = 0

    def with_stopwatch(self, stopwatch: Stopwatch | None) -> CollisionChecker:
        """Returns a checker identical to this one but charging ``stopwatch``."""
        return CollisionChecker(self.world, self.robot, self.resolution, margin=self.margin, stopwatch=stopwatch)

    def charge(self, count: int) -> None:
        """Counts ``count`` configuration checks and charges the stopwatch for them."""
        self.checks += count
        if self.stopwatch is not None:
            self.stopwatch.charge_checks(count)

    def config_free(self, q: Configuration) -> bool:
        """Returns whether ``q`` is clear of every inflated box."""
        self.charge(1)
        return not config_in_collision(q, self.world, self.robot, margin=self.margin)

    def configs_free(self, qs: npt.NDArray[np.float64]) -> npt.NDArray[np.bool_]:
        """Returns one clearance flag per configuration of a batch."""
        qs = np.atleast_2d(qs)
        self.charge(qs.shape[0])
        return ~configs_in_collision(qs, self.world, self.robot, margin=self.margin)

    def segment_free(self, a: Configuration, b: Configuration) -> bool:
        """Returns whether every sampled configuration between ``a`` and ``b`` is clear."""
        samples = segment_samples(a, b, self.resolution)
        self.charge(samples.shape[0])
        return not configs_in_collision(samples, self.world, self.robot, margin=self.margin).any()
