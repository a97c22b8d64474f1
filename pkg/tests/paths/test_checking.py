from __future__ import annotations

import numpy as np
import pytest

from reroute.cspace import Box, CollisionWorld, RobotModel, segment_in_collision
from reroute.paths import Path, check_path, recheck_path
from reroute.timing import MeteredStopwatch


@pytest.fixture
def line() -> Path:
    return Path([[float(x), 0.0, 0.0] for x in range(5)])


def _world(*centers: float) -> CollisionWorld:
    return CollisionWorld(static_boxes=tuple(Box.cube((x, 0.0, 0.0), 0.2) for x in centers))


def test_no_obstacles_gives_a_free_report(line: Path, point_robot: RobotModel) -> None:
    report = check_path(line, CollisionWorld().snapshot(2.0), point_robot)
    assert not report.obstructed
    assert report.x_before is None and report.x_after is None
    assert report.checked_at == 2.0


def test_single_obstructed_edge(line: Path, point_robot: RobotModel) -> None:
    report = check_path(line, _world(1.5).snapshot(0.0), point_robot)
    assert report.obstructed
    assert report.blocked_edges == (1,)
    assert report.x_before == line.node(1)
    assert report.x_after == line.node(2)


def test_consecutive_obstructed_edges_match_a_per_edge_check(line: Path, point_robot: RobotModel) -> None:
    snapshot = _world(2.0).snapshot(0.0)
    report = check_path(line, snapshot, point_robot, margin=0.0)
    expected = tuple(
        edge
        for edge in range(line.edge_count)
        if segment_in_collision(line.waypoints[edge], line.waypoints[edge + 1], snapshot, point_robot)
    )
    assert report.blocked_edges == expected == (1, 2)
    assert report.x_before == line.node(1)
    assert report.x_after == line.node(3)


def test_report_spans_separate_obstructions(line: Path, point_robot: RobotModel) -> None:
    report = check_path(line, _world(0.5, 3.5).snapshot(0.0), point_robot)
    assert report.blocked_edges == (0, 3)
    assert report.x_before == line.node(0)
    assert report.x_after == line.node(4)
    assert line.with_report(report).subpath(line.node(1), line.node(3)).is_feasible


def test_check_charges_the_stopwatch(line: Path, point_robot: RobotModel) -> None:
    stopwatch = MeteredStopwatch(check_cost=1.0, iteration_cost=0.0)
    check_path(line, CollisionWorld().snapshot(0.0), point_robot, 0.1, stopwatch=stopwatch)
    assert stopwatch.checks >= 4 * 10


def test_recheck_uses_the_exact_boxes(point_robot: RobotModel) -> None:
    snapshot = CollisionWorld(static_boxes=(Box.cube((0.5, 0.0, 0.0), 0.2),)).snapshot(0.0)
    grazing = Path([[0.0, 0.103, 0.0], [1.0, 0.103, 0.0]])
    assert recheck_path(grazing, snapshot, point_robot)
    assert check_path(grazing, snapshot, point_robot).obstructed
    assert not recheck_path(Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), snapshot, point_robot)


def test_recheck_single_node(point_robot: RobotModel) -> None:
    snapshot = CollisionWorld(static_boxes=(Box.cube((0.0, 0.0, 0.0), 0.2),)).snapshot(0.0)
    assert not recheck_path(Path(np.zeros((1, 3))), snapshot, point_robot)
    assert recheck_path(Path(np.ones((1, 3))), snapshot, point_robot)
