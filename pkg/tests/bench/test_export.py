from __future__ import annotations

import math
from pathlib import Path as FilePath

import numpy as np
from numpy.testing import assert_allclose

from reroute.bench import export_episode
from reroute.cspace import Box
from reroute.executor import EpisodeLog, EventKind, box_to_data
from reroute.paths import Path, load_path


def _log() -> EpisodeLog:
    log = EpisodeLog(
        trial=1,
        initial_paths=[Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), Path([[0.0, 0.0, 0.0], [0.5, 0.5, 0.0], [1.0, 0.0, 0.0]])],
        static_boxes=[Box.cube([0.5, -0.5, 0.0], 0.2)],
    )
    log.record(EventKind.SPAWN, 0.3, box=box_to_data(Box.cube([0.7, 0.0, 0.0], 0.1, 0.3)))
    log.record(EventKind.SWAP, 0.35, mode="avoidance", waypoints=[[0.3, 0.0, 0.0], [0.6, 0.3, 0.0], [1.0, 0.0, 0.0]])
    log.states.extend([(0.0, (0.0, 0.0, 0.0)), (0.01, (0.01, 0.0, 0.0)), (0.02, (0.02, 0.0, 0.0))])
    return log


def test_every_dump_is_written(tmp_path: FilePath) -> None:
    written = export_episode(_log(), tmp_path / "paths")

    assert sorted(path.name for path in written) == [
        "initial-0.txt",
        "initial-1.txt",
        "obstacles.txt",
        "replanned-000.txt",
        "traversed.txt",
    ]
    with (tmp_path / "paths" / "replanned-000.txt").open(encoding="utf-8") as f:
        assert load_path(f) == Path([[0.3, 0.0, 0.0], [0.6, 0.3, 0.0], [1.0, 0.0, 0.0]])


def test_obstacles_list_sides_and_spawn_times(tmp_path: FilePath) -> None:
    export_episode(_log(), tmp_path)

    rows = np.loadtxt(tmp_path / "obstacles.txt", ndmin=2)

    assert rows.shape == (2, 7)
    assert_allclose(rows[0, :6], [0.5, -0.5, 0.0, 0.2, 0.2, 0.2])
    assert math.isnan(rows[0, 6])
    assert rows[1, 6] == 0.3


def test_traversed_states_keep_their_times(tmp_path: FilePath) -> None:
    export_episode(_log(), tmp_path)

    rows = np.loadtxt(tmp_path / "traversed.txt", ndmin=2)

    assert_allclose(rows[:, 0], [0.0, 0.01, 0.02])
    assert_allclose(rows[:, 1], [0.0, 0.01, 0.02])


def test_logs_without_states_skip_the_traversal(tmp_path: FilePath) -> None:
    log = _log()
    log.states.clear()

    written = export_episode(log, tmp_path)

    assert "traversed.txt" not in {path.name for path in written}
