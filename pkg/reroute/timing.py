"""Time sources for budgeted computations.

Planners never read a clock directly. They receive a :class:`Stopwatch` and compare
``elapsed()`` against their budget, so the same code runs against the wall clock or
against a deterministic work meter.
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod

__all__ = (
    "Stopwatch",
    "WallStopwatch",
    "MeteredStopwatch",
)


class Stopwatch(ABC):
    """Measures the time spent by a computation since the stopwatch was started."""

    @abstractmethod
    def elapsed(self) -> float:
        """Returns the time spent so far, in seconds."""

    @abstractmethod
    def charge_checks(self, count: int) -> None:
        """Accounts for ``count`` configuration collision checks."""

    @abstractmethod
    def charge_iterations(self, count: int = 1) -> None:
        """Accounts for ``count`` planner iterations."""


class WallStopwatch(Stopwatch):
    """A stopwatch reading the monotonic performance counter."""

    def __init__(self) -> None:
        self._start: float = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self._start

    def charge_checks(self, count: int) -> None:
        pass

    def charge_iterations(self, count: int = 1) -> None:
        pass


class MeteredStopwatch(Stopwatch):
    """A stopwatch advanced by a fixed cost per unit of work.

    Attributes
    ----------
    check_cost : float
        Seconds charged per configuration collision check.
    iteration_cost : float
        Seconds charged per planner iteration.
    """

    def __init__(self, check_cost: float, iteration_cost: float) -> None:
        if check_cost < 0 or iteration_cost < 0:
            raise ValueError("Work costs must be non-negative.")
        self.check_cost: float = check_cost
        self.iteration_cost: float = iteration_cost
        self._checks: int = 0
        self._iterations: int = 0

    @property
    def checks(self) -> int:
        """int: The number of configuration checks charged so far."""
        return self._checks

    def elapsed(self) -> float:
        return self._checks * self.check_cost + self._iterations * self.iteration_cost

    def charge_checks(self, count: int) -> None:
        self._checks += count

    def charge_iterations(self, count: int = 1) -> None:
        self._iterations += count
