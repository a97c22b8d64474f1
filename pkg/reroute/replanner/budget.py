from __future__ import annotations

from dataclasses import dataclass, replace
from enum import StrEnum

from ..errors import ContractViolation
from ..paths import CollisionReport

__all__ = (
    "BudgetMode",
    "TimeBudget",
    "CycleTimeTracker",
    "update_budget",
    "cycle_gate",
)


class BudgetMode(StrEnum):
    """Why the re-planner is running."""

    AVOIDANCE = "avoidance"
    OPTIMIZATION = "optimization"


@dataclass(frozen=True, slots=True)
class TimeBudget:
    """The time allowed for one re-planning invocation.

    Attributes
    ----------
    reduced_time : float
        The budget while the current path is obstructed, in seconds.
    relaxed_time : float
        The budget while the current path is free, in seconds.
    mode : BudgetMode
        The mode the budget was last set for.
    """

    reduced_time: float
    relaxed_time: float
    mode: BudgetMode = BudgetMode.OPTIMIZATION

    def __post_init__(self) -> None:
        if not 0 < self.reduced_time < self.relaxed_time:
            raise ContractViolation(f"Budgets need 0 < reduced < relaxed, got {self.reduced_time} and {self.relaxed_time}.")

    @property
    def t_rp(self) -> float:
        """float: The budget of the current mode, in seconds."""
        return self.reduced_time if self.mode is BudgetMode.AVOIDANCE else self.relaxed_time


def update_budget(report: CollisionReport, budget: TimeBudget) -> TimeBudget:
    """Switches to the reduced budget when the current path is obstructed, the relaxed one otherwise."""
    mode = BudgetMode.AVOIDANCE if report.obstructed else BudgetMode.OPTIMIZATION
    return budget if budget.mode is mode else replace(budget, mode=mode)


class CycleTimeTracker:
    """Durations of the successful cycles of a timed search.

    With no recorded cycle the tracker imposes no cap.
    """

    __slots__ = ("durations",)

    def __init__(self) -> None:
        self.durations: list[float] = []

    def __len__(self) -> int:
        return len(self.durations)

    def record(self, duration: float) -> None:
        """Records the duration of a successful cycle, in seconds."""
        self.durations.append(max(0.0, duration))

    @property
    def mean_duration(self) -> float:
        """float: The mean recorded duration, or 0 with none recorded."""
        if not self.durations:
            return 0.0
        return sum(self.durations) / len(self.durations)


def cycle_gate(tracker: CycleTimeTracker, remaining: float, has_solution: bool) -> bool:
    """Decides whether another cycle may start.

    Parameters
    ----------
    tracker : CycleTimeTracker
        The durations of previous successful cycles.
    remaining : float
        The time left, in seconds.
    has_solution : bool
        Whether a feasible solution is already known.

    Returns
    -------
    bool
        Without a solution, whether any time is left; with one, whether the time left exceeds the
        mean successful-cycle duration.
    """
    if not has_solution:
        return remaining > 0
    return remaining > tracker.mean_duration
