from __future__ import annotations

import math

import numpy as np
import pytest

from reroute.cspace import Box, Capsule, CollisionChecker, CollisionWorld, RobotKind, RobotModel
from reroute.paths import Path


@pytest.fixture
def point_robot() -> RobotModel:
    return RobotModel.point()


@pytest.fixture
def planar_arm() -> RobotModel:
    """Two unit-half links rotating about z, reaching (1, 0, 0) at the zero configuration."""
    link = Capsule(start=(0.0, 0.0, 0.0), end=(0.5, 0.0, 0.0), radius=0.05)
    return RobotModel(
        kind=RobotKind.SERIAL_CHAIN,
        dimension=2,
        joint_axes=((0.0, 0.0, 1.0), (0.0, 0.0, 1.0)),
        link_offsets=((0.5, 0.0, 0.0), (0.5, 0.0, 0.0)),
        capsules=(link, link),
        joint_lower=(-math.pi, -math.pi),
        joint_upper=(math.pi, math.pi),
    )


@pytest.fixture
def wall() -> Box:
    """A slab across the x axis at x = 0.5, leaving room to pass above z = 0.6."""
    return Box(center=(0.5, 0.5, 0.3), half_extents=(0.05, 0.6, 0.3))


@pytest.fixture
def wall_world(wall: Box) -> CollisionWorld:
    return CollisionWorld(static_boxes=(wall,))


@pytest.fixture
def point_checker(wall_world: CollisionWorld, point_robot: RobotModel) -> CollisionChecker:
    return CollisionChecker(wall_world.snapshot(0.0), point_robot, 0.01)


@pytest.fixture
def straight_path() -> Path:
    return Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
