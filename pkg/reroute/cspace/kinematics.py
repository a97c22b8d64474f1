from __future__ import annotations

from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.spatial.transform import Rotation

from ..errors import ContractViolation
from .types import Configuration, RobotModel

__all__ = (
    "PosedCapsule",
    "forward_kinematics",
    "link_frames",
    "sphere_centers",
    "tip_position",
)


class PosedCapsule(NamedTuple):
    """A link capsule expressed in the world frame.

    Attributes
    ----------
    start : npt.NDArray[np.float64]
        The first segment endpoint.
    end : npt.NDArray[np.float64]
        The second segment endpoint.
    radius : float
        The capsule radius.
    """

    start: npt.NDArray[np.float64]
    end: npt.NDArray[np.float64]
    radius: float


def link_frames(qs: npt.NDArray[np.float64], robot: RobotModel) -> tuple[list[Rotation], list[npt.NDArray[np.float64]]]:
    """Composes the link frames of a serial chain for a batch of configurations.

    Parameters
    ----------
    qs : npt.NDArray[np.float64]
        Configurations, shape ``(n, d)``.
    robot : RobotModel
        A serial-chain robot.

    Returns
    -------
    tuple[list[Rotation], list[npt.NDArray[np.float64]]]
        For every link, the ``n`` orientations and the ``(n, 3)`` origins of its frame.
    """
    if robot.is_point:
        raise ContractViolation("Forward kinematics is only defined for serial-chain robots.")
    qs = np.atleast_2d(np.asarray(qs, dtype=np.float64))
    if qs.shape[1] != robot.dimension:
        raise ContractViolation(f"Expected configurations of dimension {robot.dimension}, got {qs.shape[1]}.")

    n = qs.shape[0]
    orientation = Rotation.identity(n)
    origin = np.broadcast_to(np.asarray(robot.base, dtype=np.float64), (n, 3)).copy()

    rotations: list[Rotation] = []
    origins: list[npt.NDArray[np.float64]] = []
    for j, (axis, offset) in enumerate(zip(robot.joint_axes, robot.link_offsets)):
        orientation = orientation * Rotation.from_rotvec(qs[:, j : j + 1] * np.asarray(axis))
        rotations.append(orientation)
        origins.append(origin)
        origin = origin + orientation.apply(np.asarray(offset, dtype=np.float64))
    return rotations, origins


def forward_kinematics(q: Configuration, robot: RobotModel) -> list[PosedCapsule]:
    """Poses every link capsule of a serial chain in the world frame.

    Parameters
    ----------
    q : Configuration
        A configuration within the joint limits.
    robot : RobotModel
        A serial-chain robot.

    Returns
    -------
    list[PosedCapsule]
        One capsule per link, in joint order.

    Raises
    ------
    ContractViolation
        The robot is a point robot, or ``q`` is not a valid configuration for it.
    """
    if robot.is_point:
        raise ContractViolation("Forward kinematics is only defined for serial-chain robots.")
    q = robot.validate(q)
    rotations, origins = link_frames(q[None, :], robot)
    posed = []
    for rotation, origin, capsule in zip(rotations, origins, robot.capsules):
        start = origin[0] + rotation.apply(np.asarray(capsule.start, dtype=np.float64))[0]
        end = origin[0] + rotation.apply(np.asarray(capsule.end, dtype=np.float64))[0]
        posed.append(PosedCapsule(start=start, end=end, radius=capsule.radius))
    return posed


def sphere_centers(qs: npt.NDArray[np.float64], robot: RobotModel) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Returns the world-frame sphere cover of the robot for a batch of configurations.

    For a point robot the configuration is the single sphere centre, with zero radius.

    Parameters
    ----------
    qs : npt.NDArray[np.float64]
        Configurations, shape ``(n, d)``.
    robot : RobotModel
        The robot.

    Returns
    -------
    tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]
        Centres of shape ``(n, S, 3)`` and radii of shape ``(S,)``.
    """
    qs = np.atleast_2d(np.asarray(qs, dtype=np.float64))
    if robot.is_point:
        return qs[:, None, :], np.zeros(1)

    rotations, origins = link_frames(qs, robot)
    centers = []
    radii = []
    for rotation, origin, capsule in zip(rotations, origins, robot.capsules):
        local, radius = capsule.sphere_cover()
        world = np.einsum("nij,kj->nki", rotation.as_matrix().reshape(-1, 3, 3), local) + origin[:, None, :]
        centers.append(world)
        radii.append(np.full(local.shape[0], radius))
    return np.concatenate(centers, axis=1), np.concatenate(radii)


def tip_position(q: Configuration, robot: RobotModel) -> npt.NDArray[np.float64]:
    """Returns the workspace point the robot reaches with configuration ``q``.

    This is ``q`` itself for a point robot, and the far endpoint of the last capsule for a chain.
    """
    if robot.is_point:
        return np.asarray(q, dtype=np.float64).copy()
    return forward_kinematics(q, robot)[-1].end
