from __future__ import annotations

import math
from typing import NamedTuple

from ..cspace import Configuration
from ..errors import ContractViolation
from ..paths import Path

__all__ = (
    "Trajectory",
    "compute_trajectory",
    "sample_trajectory",
)


class Trajectory(NamedTuple):
    """A constant-speed timing of a path.

    Attributes
    ----------
    path : Path
        The path followed.
    speed : float
        Configuration-space units per second.
    start_time : float
        When the motion starts, in seconds.
    duration : float
        How long the motion lasts, in seconds.
    """

    path: Path
    speed: float
    start_time: float
    duration: float

    @property
    def end_time(self) -> float:
        """float: When the goal is reached."""
        return self.start_time + self.duration

    def arc_at(self, t: float) -> float:
        """Returns the arc length reached at time ``t``, clamped to the path."""
        if t < self.start_time:
            raise ContractViolation(f"Cannot sample a trajectory starting at {self.start_time} at time {t}.")
        return min(self.speed * (t - self.start_time), self.path.length)


def compute_trajectory(path: Path, speed: float, start_time: float) -> Trajectory:
    """Times a path at constant speed.

    Raises
    ------
    ContractViolation
        The path is obstructed or the speed is not positive.
    """
    if not path.is_feasible or math.isinf(path.cost):
        raise ContractViolation("Cannot time an obstructed path.")
    if speed <= 0:
        raise ContractViolation(f"Speed must be positive, got {speed}.")
    return Trajectory(path=path, speed=speed, start_time=start_time, duration=path.cost / speed)


def sample_trajectory(trajectory: Trajectory, t: float) -> Configuration:
    """Returns the configuration reached at time ``t``; the goal once the motion is over."""
    return trajectory.path.point_at(trajectory.arc_at(t))
