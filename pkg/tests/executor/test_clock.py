import asyncio

import pytest

from reroute.executor import ClockMode, EventScheduler, Priority, SimClock


def _recorder(trace: list[str], label: str):
    async def action() -> None:
        trace.append(label)

    return action


def test_events_run_by_time_priority_and_submission() -> None:
    clock = SimClock(0.01)
    scheduler = EventScheduler(clock)
    trace: list[str] = []

    scheduler.schedule(0.2, Priority.EXECUTION, _recorder(trace, "late"))
    scheduler.schedule(0.1, Priority.REPLAN_START, _recorder(trace, "replan"))
    scheduler.schedule(0.1, Priority.WORLD, _recorder(trace, "world"))
    scheduler.schedule(0.1, Priority.COLLISION, _recorder(trace, "collision-1"))
    scheduler.schedule(0.1, Priority.COLLISION, _recorder(trace, "collision-2"))

    end = asyncio.run(scheduler.run(1.0))

    assert trace == ["world", "collision-1", "collision-2", "replan", "late"]
    assert end == pytest.approx(1.0)


def test_events_after_the_horizon_stay_queued() -> None:
    clock = SimClock(0.01)
    scheduler = EventScheduler(clock)
    trace: list[str] = []
    scheduler.schedule(2.0, Priority.EXECUTION, _recorder(trace, "late"))

    asyncio.run(scheduler.run(1.0))

    assert trace == []
    assert len(scheduler) == 1
    assert clock.now == pytest.approx(1.0)


def test_stop_ends_the_run_at_the_current_event() -> None:
    clock = SimClock(0.01)
    scheduler = EventScheduler(clock)
    trace: list[str] = []

    async def stop() -> None:
        trace.append("stop")
        scheduler.stop()

    scheduler.schedule(0.5, Priority.EXECUTION, stop)
    scheduler.schedule(0.6, Priority.EXECUTION, _recorder(trace, "after"))

    end = asyncio.run(scheduler.run(1.0))

    assert trace == ["stop"]
    assert end == pytest.approx(0.5)


def test_events_cannot_be_scheduled_in_the_past() -> None:
    clock = SimClock(0.01)
    clock.advance_to(1.0)
    scheduler = EventScheduler(clock)

    with pytest.raises(ValueError):
        scheduler.schedule(0.5, Priority.WORLD, _recorder([], "past"))


def test_simulated_clock_only_moves_forward() -> None:
    clock = SimClock(0.01)
    clock.advance_to(0.3)

    assert clock.now == 0.3
    with pytest.raises(ValueError):
        clock.advance_to(0.1)


def test_wall_clock_cannot_be_advanced_or_scheduled() -> None:
    clock = SimClock(0.01, ClockMode.WALL)

    assert clock.now >= 0.0
    with pytest.raises(ValueError):
        clock.advance_to(1.0)
    with pytest.raises(ValueError):
        EventScheduler(clock)


def test_tick_must_be_positive() -> None:
    with pytest.raises(ValueError):
        SimClock(0.0)
