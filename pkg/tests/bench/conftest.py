from __future__ import annotations

from pathlib import Path as FilePath

import pytest

from reroute.bench import Scenario, parse_scenario

SCENARIO_DIR = FilePath(__file__).resolve().parents[2] / "scenarios"

TINY = """\
name: tiny
seed: 5
trials: 1
paths: 2
space:
  lower: [0.0, 0.0, 0.0]
  upper: [1.0, 1.0, 1.0]
robot:
  kind: point
start: [0.1, 0.5, 0.5]
goal: [0.9, 0.5, 0.5]
obstacles:
  - center: [0.5, 0.5, 0.5]
    size: [0.1, 0.4, 0.4]
budget:
  reduced_time: 0.005
  relaxed_time: 0.01
execution:
  speed: 1.0
  time_limit: 2.0
planner:
  step: 0.1
  max_iterations: 2000
  initial_time: 0.5
  optimization_time: 0.2
spawns:
  occupied_edge: auto
  spawn_lead: 0.1
  schedule:
    - {time: 0.6, side: 0.05, placement: random-edge}
    - {time: 0.3, side: 0.05, placement: random-edge}
"""


@pytest.fixture
def tiny_text() -> str:
    return TINY


@pytest.fixture
def tiny() -> Scenario:
    return parse_scenario(TINY, source="tiny.yaml")


@pytest.fixture
def tiny_file(tmp_path: FilePath) -> FilePath:
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY, encoding="utf-8")
    return path
