from __future__ import annotations

import io

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reroute.errors import ContractViolation
from reroute.paths import Path, PathProjector, dump_path, load_path, project_on_path


def test_state_on_a_waypoint_projects_to_it(straight_path: Path) -> None:
    projection = project_on_path(np.array([0.5, 0.0, 0.0]), straight_path)
    assert projection.index == 1
    assert projection.path is straight_path
    assert projection.distance == 0.0


def test_orthogonal_projection_is_inserted_as_a_waypoint() -> None:
    path = Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    projection = project_on_path(np.array([0.5, 0.3, 0.0]), path)
    assert_allclose(projection.node.array, [0.5, 0.0, 0.0])
    assert projection.arc == pytest.approx(0.5)
    assert projection.distance == pytest.approx(0.3)
    assert len(projection.path) == 3
    assert projection.path.node(projection.index) == projection.node


def test_ties_go_to_the_earlier_edge() -> None:
    # The path comes back on itself: both passes are equally close.
    path = Path([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    projection = project_on_path(np.array([0.5, 0.5]), path)
    assert_allclose(projection.node.array, [0.5, 0.0])


def test_projector_never_moves_backwards() -> None:
    path = Path([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    projector = PathProjector(path)
    assert_allclose(projector.project(np.array([1.0, 0.5])).node.array, [1.0, 0.5])
    # Closer to the first edge, but the robot is already past it.
    late = projector.project(np.array([0.5, 0.1]))
    assert late.arc >= 1.5
    projector.reset(path)
    assert_allclose(projector.project(np.array([0.5, 0.1])).node.array, [0.5, 0.0])


def test_projection_rejects_wrong_dimension(straight_path: Path) -> None:
    with pytest.raises(ContractViolation):
        project_on_path(np.zeros(2), straight_path)


def test_dump_writes_one_waypoint_per_line() -> None:
    path = Path([[0.1, 0.2, 0.3], [1.0 / 3.0, 2.0, -1.5]], blocked=[0])
    stream = io.StringIO()
    dump_path(path, stream)
    rows = [line for line in stream.getvalue().splitlines() if not line.startswith("#")]
    assert len(rows) == 2
    assert len(rows[0].split()) == 3
    assert load_path(io.StringIO(stream.getvalue())) == path


def test_load_rejects_an_empty_dump() -> None:
    with pytest.raises(ContractViolation):
        load_path(io.StringIO("# nothing here\n"))
