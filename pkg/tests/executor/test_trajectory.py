import numpy as np
import pytest
from numpy.testing import assert_allclose

from reroute.errors import ContractViolation
from reroute.executor import compute_trajectory, sample_trajectory
from reroute.paths import Path


def test_duration_is_length_over_speed() -> None:
    trajectory = compute_trajectory(Path([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), 1.0, 0.0)

    assert trajectory.duration == pytest.approx(2.0)
    assert trajectory.end_time == pytest.approx(2.0)
    assert_allclose(sample_trajectory(trajectory, 1.0), [1.0, 0.0, 0.0])


def test_samples_after_the_end_stay_at_the_goal() -> None:
    trajectory = compute_trajectory(Path([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]), 1.0, 0.0)

    assert_allclose(sample_trajectory(trajectory, 5.0), [2.0, 0.0, 0.0])


def test_samples_follow_every_edge() -> None:
    trajectory = compute_trajectory(Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]), 2.0, 0.5)

    assert trajectory.duration == pytest.approx(1.0)
    assert_allclose(sample_trajectory(trajectory, 0.5), [0.0, 0.0, 0.0])
    assert_allclose(sample_trajectory(trajectory, 1.25), [1.0, 0.5, 0.0])


def test_sampling_before_the_start_is_rejected() -> None:
    trajectory = compute_trajectory(Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), 1.0, 1.0)

    with pytest.raises(ContractViolation):
        sample_trajectory(trajectory, 0.5)


def test_obstructed_paths_cannot_be_timed() -> None:
    with pytest.raises(ContractViolation):
        compute_trajectory(Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], blocked=[0]), 1.0, 0.0)


@pytest.mark.parametrize("speed", [0.0, -1.0])
def test_speed_must_be_positive(speed: float) -> None:
    with pytest.raises(ContractViolation):
        compute_trajectory(Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), speed, 0.0)


def test_single_node_path_has_no_duration() -> None:
    trajectory = compute_trajectory(Path([[0.3, 0.2, 0.1]]), 1.0, 0.0)

    assert trajectory.duration == 0.0
    assert_allclose(sample_trajectory(trajectory, 3.0), np.array([0.3, 0.2, 0.1]))
