from __future__ import annotations

import asyncio
import io

import numpy as np
import pytest

from reroute.bench import check_monotonicity
from reroute.cspace import Box, CollisionWorld, RobotModel, config_in_collision
from reroute.errors import ContractViolation
from reroute.executor import EpisodeLog, EpisodeSettings, EventKind, ScheduledSpawn, SpawnContext, run_episode
from reroute.paths import Path, PathSet, recheck_path
from reroute.planners import SamplingBounds
from reroute.replanner import TimeBudget

STRAIGHT = Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]])
DETOUR = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
DOG_LEG = Path([[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1.0, 0.0, 0.0]])


@pytest.fixture
def settings() -> EpisodeSettings:
    return EpisodeSettings(
        robot=RobotModel.point(),
        bounds=SamplingBounds([-0.2, -0.7, -0.3], [1.2, 0.7, 0.3]),
        budget=TimeBudget(0.05, 0.1),
        time_limit=3.0,
    )


def _traversed(log: EpisodeLog) -> float:
    configs = np.array([config for _, config in log.states])
    return float(np.linalg.norm(np.diff(configs, axis=0), axis=1).sum())


def _comparable(log: EpisodeLog) -> list[tuple]:
    return [(event.kind, event.time, {k: v for k, v in event.data.items() if k != "wall_elapsed"}) for event in log.events]


def _fixed(center: list[float], side: float):
    def spawner(context: SpawnContext) -> Box:
        return Box.cube(center, side)

    return spawner


def _on_robot(side: float):
    def spawner(context: SpawnContext) -> Box:
        return Box.cube(context.state.config, side)

    return spawner


def test_free_world_reaches_the_goal_on_a_shorter_path(settings: EpisodeSettings) -> None:
    log = asyncio.run(run_episode(PathSet([DOG_LEG, STRAIGHT]), CollisionWorld(), settings, rng=np.random.default_rng(7)))

    assert log.reached_goal
    assert log.safety_stops == 0
    assert any(True for _ in log.of_kind(EventKind.SWAP))
    assert _traversed(log) <= DOG_LEG.length + 1e-6
    assert log.end_time < DOG_LEG.length / settings.speed


def test_accepted_swaps_never_lengthen_what_is_left(settings: EpisodeSettings) -> None:
    detour = Path([[0.0, 0.0, 0.0], [0.3, 0.45, 0.0], [0.6, 0.5, 0.0], [1.0, 0.0, 0.0]])

    log = asyncio.run(run_episode(PathSet([DOG_LEG, detour, STRAIGHT]), CollisionWorld(), settings, rng=np.random.default_rng(11)))

    assert log.reached_goal
    assert check_monotonicity(log) == []


def test_obstacle_ahead_is_avoided(settings: EpisodeSettings) -> None:
    spawns = [ScheduledSpawn(0.1, _fixed([0.75, 0.0, 0.0], 0.1))]

    log = asyncio.run(run_episode(PathSet([STRAIGHT, DETOUR]), CollisionWorld(), settings, spawns=spawns, rng=np.random.default_rng(7)))

    assert log.reached_goal
    assert next(log.of_kind(EventKind.COLLISION_DETECTED)).time >= 0.1
    swaps = list(log.of_kind(EventKind.SWAP))
    assert any(swap.data["mode"] == "avoidance" for swap in swaps)

    world = CollisionWorld(moving_boxes=tuple(log.spawned_boxes))
    snapshot = world.snapshot(settings.time_limit)
    robot = settings.robot
    for swap in swaps:
        if swap.time >= 0.1:
            assert recheck_path(Path(swap.data["waypoints"]), snapshot, robot)
    assert not any(config_in_collision(np.array(config), snapshot, robot) for _, config in log.states)


def test_obstacle_on_the_robot_stops_it(settings: EpisodeSettings) -> None:
    spawns = [ScheduledSpawn(0.2, _on_robot(0.4))]

    log = asyncio.run(run_episode(PathSet([STRAIGHT, DETOUR]), CollisionWorld(), settings, spawns=spawns, rng=np.random.default_rng(7)))

    assert not log.reached_goal
    assert log.safety_stops == 1
    stop = next(log.of_kind(EventKind.SAFETY_STOP))
    assert stop.time >= 0.2
    assert any(True for _ in log.of_kind(EventKind.TIMEOUT))
    # the robot does not move once stopped
    after = [config for time, config in log.states if time > stop.time]
    assert all(config == after[0] for config in after)


def test_spawns_after_the_time_limit_are_skipped(settings: EpisodeSettings) -> None:
    spawns = [ScheduledSpawn(settings.time_limit + 1.0, _fixed([0.75, 0.0, 0.0], 0.1))]

    log = asyncio.run(run_episode(PathSet([STRAIGHT]), CollisionWorld(), settings, spawns=spawns, rng=np.random.default_rng(7)))

    assert log.reached_goal
    assert log.spawned_boxes == []


def test_episodes_are_deterministic(settings: EpisodeSettings) -> None:
    spawns = [ScheduledSpawn(0.1, _fixed([0.75, 0.0, 0.0], 0.1))]

    first = asyncio.run(run_episode(PathSet([STRAIGHT, DETOUR]), CollisionWorld(), settings, spawns=spawns, rng=np.random.default_rng(3)))
    second = asyncio.run(run_episode(PathSet([STRAIGHT, DETOUR]), CollisionWorld(), settings, spawns=spawns, rng=np.random.default_rng(3)))

    assert first.states == second.states
    assert _comparable(first) == _comparable(second)


def test_obstructed_initial_paths_are_rejected(settings: EpisodeSettings) -> None:
    with pytest.raises(ContractViolation):
        asyncio.run(run_episode(PathSet([STRAIGHT.with_blocked([1])]), CollisionWorld(), settings, rng=np.random.default_rng(0)))


def test_logs_survive_a_jsonl_round_trip(settings: EpisodeSettings) -> None:
    world = CollisionWorld(static_boxes=(Box.cube([0.5, -0.5, 0.0], 0.1),))
    spawns = [ScheduledSpawn(0.1, _fixed([0.75, 0.0, 0.0], 0.1))]
    log = asyncio.run(run_episode(PathSet([STRAIGHT, DETOUR]), world, settings, spawns=spawns, rng=np.random.default_rng(7), trial=4))

    stream = io.StringIO()
    log.write_jsonl(stream)
    stream.seek(0)
    restored = EpisodeLog.read_jsonl(stream)

    assert restored.trial == 4
    assert restored.initial_paths == log.initial_paths
    assert restored.static_boxes == log.static_boxes
    assert restored.spawned_boxes == log.spawned_boxes
    assert [event.kind for event in restored.events] == [event.kind for event in log.events]
    assert len(restored.states) == len(log.states)
    assert restored.end_time == pytest.approx(log.end_time)


def test_logs_without_a_start_record_are_rejected() -> None:
    with pytest.raises(ContractViolation):
        EpisodeLog.read_jsonl(io.StringIO('{"kind":"goal-reached","time":1.0}\n'))


def test_malformed_log_lines_are_rejected() -> None:
    with pytest.raises(ContractViolation):
        EpisodeLog.read_jsonl(io.StringIO("not json\n"))
