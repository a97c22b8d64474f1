import pytest
from numpy.testing import assert_allclose

from reroute.cspace import Box, CollisionChecker, CollisionWorld, RobotModel
from reroute.executor import bridge_onto, remaining_length
from reroute.paths import Node, Path, recheck_path

ROBOT = RobotModel.point()
OLD = Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]])
X_H = Node.of([0.5, 0.0, 0.0])
NEW = Path([[0.5, 0.0, 0.0], [0.7, 0.5, 0.0], [1.0, 1.0, 0.0]])
AHEAD = [0.8, 0.0, 0.0]

# blocks the straight edge from AHEAD to its closest point on NEW, but not OLD
ACROSS = Box.cube([0.67, 0.06, 0.0], 0.06)
# blocks OLD between X_H and AHEAD
BEHIND = Box.cube([0.65, 0.0, 0.0], 0.04)


def _checker(*boxes: Box) -> CollisionChecker:
    return CollisionChecker(CollisionWorld(static_boxes=boxes).snapshot(0.0), ROBOT, 0.01)


def test_robot_on_the_new_path_follows_it_from_where_it_is() -> None:
    path = bridge_onto([0.6, 0.25, 0.0], NEW, OLD, X_H, _checker(ACROSS, BEHIND))

    assert path is not None
    assert_allclose(path.waypoints[0], [0.6, 0.25, 0.0])
    assert_allclose(path.waypoints[-1], [1.0, 1.0, 0.0])
    assert path.length < NEW.length


def test_free_straight_edge_joins_the_new_path() -> None:
    path = bridge_onto(AHEAD, NEW, OLD, X_H, _checker())

    assert path is not None
    assert_allclose(path.waypoints[0], AHEAD)
    assert len(path) == len(NEW) + 1
    assert path.length < 0.3 + NEW.length


def test_blocked_straight_edge_backs_up_along_the_old_path() -> None:
    checker = _checker(ACROSS)

    path = bridge_onto(AHEAD, NEW, OLD, X_H, checker)

    assert path is not None
    assert_allclose(path.waypoints[:2], [AHEAD, X_H.config])
    assert_allclose(path.waypoints[1:], NEW.waypoints)
    assert path.length == pytest.approx(0.3 + NEW.length)
    assert recheck_path(path, checker.world, ROBOT)


def test_no_free_way_onto_the_new_path_gives_nothing() -> None:
    assert bridge_onto(AHEAD, NEW, OLD, X_H, _checker(ACROSS, BEHIND)) is None


def test_robot_behind_the_replan_start_is_checked_not_rejected() -> None:
    x_h = Node.of([1.0, 0.5, 0.0])
    new_path = Path([[1.0, 0.5, 0.0], [1.3, 0.8, 0.0], [1.0, 1.0, 0.0]])
    robot = [0.9, 0.05, 0.0]

    free = bridge_onto(robot, new_path, OLD, x_h, _checker())
    blocked = bridge_onto(robot, new_path, OLD, x_h, _checker(Box.cube([0.95, 0.275, 0.0], 0.05)))

    assert free is not None
    assert_allclose(free.waypoints[0], robot)
    assert blocked is None


def test_remaining_length_follows_the_old_path_from_the_replan_start() -> None:
    assert remaining_length(AHEAD, OLD, X_H) == pytest.approx(1.2)
    assert remaining_length(X_H.config, OLD, X_H) == pytest.approx(1.5)
    assert remaining_length([1.0, 1.0, 0.0], OLD, X_H) == pytest.approx(0.0)
    # off the path: the distance to it counts too
    assert remaining_length([1.1, 0.5, 0.0], OLD, X_H) == pytest.approx(0.1 + 0.5)