from __future__ import annotations

import heapq
import logging
import time
from collections.abc import Awaitable, Callable
from dataclasses import dataclass, field
from enum import IntEnum, StrEnum

__all__ = (
    "ClockMode",
    "SimClock",
    "Priority",
    "EventScheduler",
)


_log = logging.getLogger(__name__)


class ClockMode(StrEnum):
    """How episode time advances."""

    SIMULATED = "simulated"
    WALL = "wall"


class SimClock:
    """The episode clock.

    In simulated mode time only moves when the scheduler advances it. In wall mode it reads
    the monotonic performance counter from the moment the clock was created.

    Attributes
    ----------
    tick : float
        The execution period, in seconds.
    mode : ClockMode
        How time advances.
    """

    def __init__(self, tick: float, mode: ClockMode = ClockMode.SIMULATED) -> None:
        if tick <= 0:
            raise ValueError("The clock tick must be positive.")
        self.tick: float = tick
        self.mode: ClockMode = mode
        self._now: float = 0.0
        self._origin: float = time.perf_counter()

    @property
    def now(self) -> float:
        """float: The episode time, in seconds."""
        if self.mode is ClockMode.WALL:
            return time.perf_counter() - self._origin
        return self._now

    def advance_to(self, instant: float) -> None:
        """Moves simulated time forward to ``instant``.

        Raises
        ------
        ValueError
            The clock is in wall mode, or ``instant`` is in the past.
        """
        if self.mode is ClockMode.WALL:
            raise ValueError("A wall clock cannot be advanced.")
        if instant < self._now:
            raise ValueError(f"Cannot move the clock back from {self._now} to {instant}.")
        self._now = instant


class Priority(IntEnum):
    """The order of events scheduled for the same instant; lower runs first."""

    WORLD = 0
    EXECUTION = 1
    COLLISION = 2
    REPLAN_DELIVERY = 3
    REPLAN_START = 4


@dataclass(order=True, slots=True)
class _ScheduledEvent:
    time: float
    priority: int
    sequence: int
    action: Callable[[], Awaitable[None]] = field(compare=False)


class EventScheduler:
    """A deterministic discrete-event scheduler driving coroutines in simulated time.

    Events run in ``(time, priority, submission order)`` order, each awaited to completion
    before the next starts.
    """

    def __init__(self, clock: SimClock) -> None:
        if clock.mode is not ClockMode.SIMULATED:
            raise ValueError("The event scheduler needs a simulated clock.")
        self.clock: SimClock = clock
        self._queue: list[_ScheduledEvent] = []
        self._sequence: int = 0
        self._stopped: bool = False

    def __len__(self) -> int:
        return len(self._queue)

    def schedule(self, instant: float, priority: Priority, action: Callable[[], Awaitable[None]]) -> None:
        """Schedules ``action`` to run at ``instant``.

        Raises
        ------
        ValueError
            ``instant`` is in the past.
        """
        if instant < self.clock.now:
            raise ValueError(f"Cannot schedule at {instant}, the clock is at {self.clock.now}.")
        self._sequence += 1
        heapq.heappush(self._queue, _ScheduledEvent(instant, int(priority), self._sequence, action))

    def stop(self) -> None:
        """Makes :meth:`run` return before the next event."""
        self._stopped = True

    async def run(self, until: float) -> float:
        """Runs events up to and including ``until``.

        Returns
        -------
        float
            The clock time when the run ended.
        """
        self._stopped = False
        while self._queue and not self._stopped:
            if self._queue[0].time > until:
                break
            event = heapq.heappop(self._queue)
            self.clock.advance_to(event.time)
            await event.action()
        if not self._stopped:
            self.clock.advance_to(max(self.clock.now, until))
        _log.debug("Scheduler stopped at t=%.4f with %d pending events", self.clock.now, len(self._queue))
        return self.clock.now
