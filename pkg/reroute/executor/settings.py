from __future__ import annotations

from dataclasses import dataclass, field

from ..cspace import DEFAULT_RESOLUTION, RobotModel
from ..errors import ContractViolation
from ..paths import EPS_MERGE
from ..planners import ConnectorSettings, SamplingBounds
from ..replanner import TimeBudget
from ..timing import MeteredStopwatch, Stopwatch, WallStopwatch
from .clock import ClockMode

__all__ = ("EpisodeSettings",)


@dataclass(frozen=True, slots=True)
class EpisodeSettings:
    """The parameters of one execution episode.

    Attributes
    ----------
    robot : RobotModel
        The robot geometry.
    bounds : SamplingBounds
        The admissible configurations.
    budget : TimeBudget
        The reduced and relaxed re-planning budgets.
    speed : float
        The execution speed, in configuration-space units per second.
    execution_rate : float
        The execution loop rate, in hertz.
    collision_rate : float
        The collision loop rate, in hertz.
    replan_period : float
        The shortest time between the starts of two re-planning invocations, in seconds.
    time_limit : float
        The episode length limit, in seconds.
    goal_tolerance : float
        The distance to the goal at which it counts as reached.
    resolution : float
        The collision check resolution.
    merge_threshold : float
        The node merge threshold of the switching search.
    connector : ConnectorSettings
        The connector planner tuning.
    check_cost : float
        Metered seconds per configuration check.
    iteration_cost : float
        Metered seconds per planner iteration.
    clock_mode : ClockMode
        Whether time is simulated or read from the wall clock.
    """

    robot: RobotModel
    bounds: SamplingBounds
    budget: TimeBudget
    speed: float = 1.0
    execution_rate: float = 100.0
    collision_rate: float = 30.0
    replan_period: float = 0.01
    time_limit: float = 10.0
    goal_tolerance: float = 1e-3
    resolution: float = DEFAULT_RESOLUTION
    merge_threshold: float = EPS_MERGE
    connector: ConnectorSettings = field(default_factory=ConnectorSettings)
    check_cost: float = 1e-5
    iteration_cost: float = 5e-5
    clock_mode: ClockMode = ClockMode.SIMULATED

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ContractViolation("The execution speed must be positive.")
        if self.execution_rate <= 0 or self.collision_rate <= 0:
            raise ContractViolation("Loop rates must be positive.")
        if self.replan_period <= 0 or self.time_limit <= 0:
            raise ContractViolation("The re-planning period and the time limit must be positive.")

    @property
    def execution_period(self) -> float:
        """float: Seconds between execution ticks."""
        return 1.0 / self.execution_rate

    @property
    def collision_period(self) -> float:
        """float: Seconds between collision checks."""
        return 1.0 / self.collision_rate

    def new_stopwatch(self) -> Stopwatch:
        """Returns a started stopwatch matching the clock mode."""
        if self.clock_mode is ClockMode.WALL:
            return WallStopwatch()
        return MeteredStopwatch(self.check_cost, self.iteration_cost)
