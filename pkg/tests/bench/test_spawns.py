from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reroute.bench import FixedSpawner, OccupiedEdgeSpawner, RandomEdgeSpawner, build_spawns
from reroute.cspace import RobotModel
from reroute.executor import RobotState, SpawnContext
from reroute.paths import Path, PathSet

LINE = Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]])


def _context(x: float, rng: np.random.Generator, time: float = 0.4) -> SpawnContext:
    return SpawnContext(
        time=time,
        state=RobotState(time, (x, 0.0, 0.0), False, False),
        path_set=PathSet([LINE]),
        robot=RobotModel.point(),
        rng=rng,
    )


def test_random_edge_cubes_land_ahead_of_the_robot(rng: np.random.Generator) -> None:
    spawner = RandomEdgeSpawner(0.05)

    for _ in range(20):
        box = spawner(_context(0.2, rng))
        assert box is not None
        x, y, z = box.center
        assert 0.25 < x < 0.95
        assert y == pytest.approx(0.0) and z == pytest.approx(0.0)
        assert box.spawn_time == pytest.approx(0.4)
        assert box.half_extents == pytest.approx((0.025, 0.025, 0.025))


def test_random_edge_declines_at_the_goal(rng: np.random.Generator) -> None:
    assert RandomEdgeSpawner(0.05)(_context(1.0, rng)) is None


def test_occupied_edge_cube_leads_the_robot(rng: np.random.Generator) -> None:
    box = OccupiedEdgeSpawner(0.05, 0.1)(_context(0.2, rng))

    assert box is not None
    assert_allclose(box.center, [0.3, 0.0, 0.0])


def test_occupied_edge_lead_is_clamped_to_the_edge(rng: np.random.Generator) -> None:
    box = OccupiedEdgeSpawner(0.05, 0.1)(_context(0.45, rng))

    assert box is not None
    assert_allclose(box.center, [0.5, 0.0, 0.0], atol=1e-12)


def test_fixed_cubes(rng: np.random.Generator) -> None:
    box = FixedSpawner(0.1, (0.2, 0.3, 0.4))(_context(0.2, rng, time=1.5))

    assert box.center == pytest.approx((0.2, 0.3, 0.4))
    assert box.spawn_time == pytest.approx(1.5)


def test_one_random_edge_spawn_obstructs_the_occupied_edge(tiny) -> None:
    for seed in range(10):
        spawns = build_spawns(tiny, np.random.default_rng(seed))

        assert [spawn.time for spawn in spawns] == [0.3, 0.6]
        assert sum(isinstance(spawn.spawner, OccupiedEdgeSpawner) for spawn in spawns) == 1
        assert sum(isinstance(spawn.spawner, RandomEdgeSpawner) for spawn in spawns) == 1


def test_schedules_without_auto_are_kept(tiny) -> None:
    scenario = dataclasses.replace(tiny, occupied_edge_auto=False)

    spawns = build_spawns(scenario, np.random.default_rng(0))

    assert all(isinstance(spawn.spawner, RandomEdgeSpawner) for spawn in spawns)
