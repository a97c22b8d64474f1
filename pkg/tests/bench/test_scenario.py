from __future__ import annotations

import logging

import numpy as np
import pytest

from reroute.bench import Placement, load_scenario, parse_scenario
from reroute.cspace import RobotKind, config_in_collision, segment_in_collision
from reroute.errors import ScenarioError
from reroute.executor import ClockMode
from reroute.planners import ConnectorKind

from .conftest import SCENARIO_DIR, TINY


def test_tiny_scenario_is_parsed(tiny) -> None:
    assert tiny.name == "tiny"
    assert tiny.source == "tiny.yaml"
    assert tiny.dimension == 3
    assert tiny.path_count == 2
    assert tiny.budget.reduced_time == pytest.approx(0.005)
    assert tiny.settings.connector.step == pytest.approx(0.1)
    assert tiny.occupied_edge_auto
    assert tiny.spawn_lead == pytest.approx(0.1)


def test_spawns_are_sorted_by_time(tiny) -> None:
    assert [spec.time for spec in tiny.spawns] == [0.3, 0.6]
    assert all(spec.placement is Placement.RANDOM_EDGE for spec in tiny.spawns)


def test_missing_fields_take_their_defaults(tiny) -> None:
    settings = tiny.settings
    assert settings.execution_rate == pytest.approx(100.0)
    assert settings.collision_rate == pytest.approx(30.0)
    assert settings.resolution == pytest.approx(0.01)
    assert settings.connector.kind is ConnectorKind.RRT_CONNECT
    assert settings.clock_mode is ClockMode.SIMULATED


def test_missing_budget_warns_and_uses_defaults(caplog: pytest.LogCaptureFixture) -> None:
    text = TINY.replace("budget:\n  reduced_time: 0.005\n  relaxed_time: 0.01\n", "")

    with caplog.at_level(logging.WARNING):
        scenario = parse_scenario(text)

    assert scenario.budget.reduced_time == pytest.approx(0.05)
    assert scenario.budget.relaxed_time == pytest.approx(0.1)
    assert "budget not fully specified" in caplog.text


def test_start_inside_an_obstacle_is_rejected() -> None:
    text = TINY.replace("start: [0.1, 0.5, 0.5]", "start: [0.5, 0.5, 0.5]")

    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, source="bad.yaml")

    assert info.value.field == "start"
    assert info.value.line == 10
    assert str(info.value).startswith("bad.yaml:10: start:")


def test_box_sizes_must_be_positive() -> None:
    text = TINY.replace("size: [0.1, 0.4, 0.4]", "size: [0.1, -0.4, 0.4]")

    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)

    assert info.value.field == "obstacles.0.size"
    assert info.value.line == 14


def test_budgets_must_be_ordered() -> None:
    text = TINY.replace("relaxed_time: 0.01", "relaxed_time: 0.001")

    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)

    assert info.value.field == "budget"


def test_unknown_placements_list_the_options() -> None:
    text = TINY.replace("placement: random-edge}\n    - {time: 0.3", "placement: sideways}\n    - {time: 0.3")

    with pytest.raises(ScenarioError, match="random-edge, occupied-edge, fixed"):
        parse_scenario(text)


def test_spawns_after_the_time_limit_are_rejected() -> None:
    with pytest.raises(ScenarioError, match="after the episode time limit"):
        parse_scenario(TINY.replace("time: 0.6", "time: 2.5"))


def test_point_robots_need_space_bounds() -> None:
    text = TINY.replace("space:\n  lower: [0.0, 0.0, 0.0]\n  upper: [1.0, 1.0, 1.0]\n", "")

    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)

    assert info.value.field == "space"


def test_invalid_yaml_reports_its_line() -> None:
    with pytest.raises(ScenarioError) as info:
        parse_scenario("name: broken\nrobot: [unclosed\n")

    assert info.value.line is not None


def test_missing_files_are_scenario_errors(tmp_path) -> None:
    with pytest.raises(ScenarioError, match="cannot read the file"):
        load_scenario(tmp_path / "missing.yaml")


def test_overrides(tiny) -> None:
    scenario = tiny.with_overrides(seed=11, trials=0, clock_mode=ClockMode.WALL)

    assert scenario.seed == 11
    assert scenario.trials == 0
    assert scenario.settings.clock_mode is ClockMode.WALL
    assert tiny.with_overrides() is tiny


def test_negative_trial_override_is_rejected(tiny) -> None:
    with pytest.raises(ScenarioError):
        tiny.with_overrides(trials=-1)


def test_shipped_point_scenario() -> None:
    scenario = load_scenario(SCENARIO_DIR / "scene3d.yaml")

    assert scenario.dimension == 3
    assert scenario.robot.kind is RobotKind.POINT
    assert len(scenario.static_boxes) == 4
    assert [spec.time for spec in scenario.spawns] == [0.5, 1.0, 1.5]
    assert all(spec.side == pytest.approx(0.05) for spec in scenario.spawns)
    assert scenario.budget.reduced_time == pytest.approx(0.05)
    assert scenario.budget.relaxed_time == pytest.approx(0.1)


def test_shipped_arm_scenario() -> None:
    scenario = load_scenario(SCENARIO_DIR / "cell6d.yaml")

    assert scenario.dimension == 6
    assert scenario.robot.kind is RobotKind.SERIAL_CHAIN
    assert scenario.budget.reduced_time == pytest.approx(0.07)
    assert scenario.budget.relaxed_time == pytest.approx(0.12)
    assert "6-joint chain" in scenario.describe()


def test_shipped_arm_is_the_default_chain() -> None:
    robot = load_scenario(SCENARIO_DIR / "cell6d.yaml").robot

    assert [tuple(axis) for axis in robot.joint_axes] == [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0)] * 3
    assert [capsule.length for capsule in robot.capsules] == pytest.approx([0.4, 0.4, 0.3, 0.2, 0.1, 0.1])
    assert [capsule.radius for capsule in robot.capsules] == pytest.approx([0.05] * 6)


def test_shipped_arm_poses_clear_the_column() -> None:
    scenario = load_scenario(SCENARIO_DIR / "cell6d.yaml")
    snapshot = scenario.world.snapshot(0.0)

    assert not config_in_collision(np.array(scenario.start), snapshot, scenario.robot)
    assert not config_in_collision(np.array(scenario.goal), snapshot, scenario.robot)
    # the straight sweep between them runs through the column
    assert segment_in_collision(np.array(scenario.start), np.array(scenario.goal), snapshot, scenario.robot, 0.01)
