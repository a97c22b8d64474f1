from __future__ import annotations

import math

import numpy as np
import pytest

from reroute.cspace import CollisionWorld, RobotModel, distance
from reroute.paths import Node, Path, PathSet
from reroute.replanner import path_switch, prune_check

from .toy import flagged, make_context, random_path, random_world

BIG_BUDGET = 1e6


def test_prune_check_rejects_nodes_that_cannot_improve() -> None:
    assert not prune_check(Node.of([0.0, 0.0, 0.0]), Node.of([2.0, 0.0, 0.0]), 5.0, 4.0)


def test_prune_check_accepts_everything_without_incumbent() -> None:
    assert prune_check(Node.of([0.0, 0.0, 0.0]), Node.of([2.0, 0.0, 0.0]), math.inf, 4.0)


def test_prune_check_accepts_nodes_with_room_left() -> None:
    assert prune_check(Node.of([0.0, 0.0, 0.0]), Node.of([0.5, 0.0, 0.0]), 5.0, 4.0)


def test_prune_check_rejects_unreachable_tails() -> None:
    assert not prune_check(Node.of([0.0, 0.0, 0.0]), Node.of([0.5, 0.0, 0.0]), 5.0, math.inf)


def test_no_alternatives_returns_the_remainder(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.3, 0.0], [1.0, 0.0, 0.0]])
    x_n = sigma_i.node(1)
    context = make_context(CollisionWorld(), robot, rng)

    result = path_switch(x_n, sigma_i, [], BIG_BUDGET, context)

    assert result.path == sigma_i.subpath(x_n, sigma_i.goal)
    assert result.stats.cycles == 0


def test_zero_time_keeps_the_incumbent(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    straight = Path([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    context = make_context(CollisionWorld(), robot, rng)

    result = path_switch(sigma_i.start, sigma_i, [straight], 0.0, context)

    assert result.path == sigma_i
    assert result.stats.cycles == 0


def test_switches_onto_a_shorter_path(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    straight = Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]])
    context = make_context(CollisionWorld(), robot, rng)

    result = path_switch(sigma_i.start, sigma_i, [straight], BIG_BUDGET, context)

    assert result.path.cost == pytest.approx(1.0)
    assert result.path.start == sigma_i.start
    assert result.path.goal == sigma_i.goal
    assert result.stats.improvements >= 1


def test_never_switches_onto_an_obstructed_tail(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    blocked = Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]], blocked=[1])
    context = make_context(CollisionWorld(), robot, rng)

    result = path_switch(sigma_i.start, sigma_i, [blocked], BIG_BUDGET, context)

    # only the goal of the blocked path has a finite tail, and jumping there is the straight edge
    assert result.path.is_feasible
    assert result.path.cost == pytest.approx(1.0)
    assert all(candidate.lower_bound == math.inf for candidate in result.stats.pruned if candidate.x_j.array[0] < 1.0)


def test_trivial_jumps_are_not_counted_as_cycles(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    straight = Path([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [1.0, 0.0, 0.0]])
    context = make_context(CollisionWorld(), robot, rng)

    result = path_switch(sigma_i.start, sigma_i, [straight], BIG_BUDGET, context)

    # the shared start node is joined without a connector call
    assert result.stats.improvements >= 1
    assert result.stats.successful_cycles <= result.stats.cycles


def test_close_nodes_are_merged(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    dense = Path([[0.0, 0.0, 0.0], [0.5, 0.1, 0.0], [0.51, 0.1, 0.0], [1.0, 0.0, 0.0]], blocked=[0])
    context = make_context(CollisionWorld(), robot, rng, merge_threshold=0.05)

    result = path_switch(sigma_i.start, sigma_i, [dense], BIG_BUDGET, context)

    # (0.5, 0.1) is tried, so its neighbour (0.51, 0.1) is skipped
    assert result.stats.merged == 1
    assert result.path.cost == pytest.approx(1.0)


def test_nodes_next_to_a_pruned_node_are_still_tried(rng: np.random.Generator) -> None:
    robot = RobotModel.point()
    sigma_i = Path([[0.0, 0.0, 0.0], [0.5, 0.4, 0.0], [1.0, 0.0, 0.0]])
    # the blocked edge makes (0.5, 0.1) unable to reach the goal, while (0.52, 0.1) right after it can
    dense = Path([[0.0, 0.0, 0.0], [0.5, 0.1, 0.0], [0.52, 0.1, 0.0], [1.0, 0.0, 0.0]], blocked=[1])
    context = make_context(CollisionWorld(), robot, rng, merge_threshold=0.05)

    result = path_switch(sigma_i.start, sigma_i, [dense], BIG_BUDGET, context)

    assert [candidate.x_j for candidate in result.stats.pruned[:2]] == [dense.node(0), dense.node(1)]
    assert result.stats.merged == 0
    assert result.stats.improvements == 2
    assert result.path.cost == pytest.approx(1.0)


def _brute_force_cost(x_n: Node, sigma_i: Path, alternatives: list[Path]) -> float:
    best = sigma_i.subpath(x_n, sigma_i.goal).cost
    for sigma_j in alternatives:
        tails = sigma_j.suffix_costs
        for k in range(len(sigma_j)):
            best = min(best, distance(x_n.array, sigma_j.waypoints[k]) + float(tails[k]))
    return best


def _check_empty_world_equivalence(seed: int) -> None:
    rng = np.random.default_rng(seed)
    robot = RobotModel.point()
    world = CollisionWorld()
    paths = [random_path(rng, world, robot) for _ in range(int(rng.integers(2, 4)))]
    sigma_i, alternatives = paths[0], paths[1:]
    x_n = sigma_i.node(int(rng.integers(0, len(sigma_i))))

    result = path_switch(x_n, sigma_i, alternatives, BIG_BUDGET, make_context(world, robot, rng))

    assert result.path.cost == pytest.approx(_brute_force_cost(x_n, sigma_i, alternatives), abs=1e-6)


def _check_pruning_admissible(seed: int) -> None:
    rng = np.random.default_rng(seed)
    robot = RobotModel.point()
    world = random_world(rng, int(rng.integers(0, 3)))
    path_set = flagged(PathSet([random_path(rng, world, robot) for _ in range(int(rng.integers(2, 4)))]), world, robot)
    sigma_i = path_set.current
    x_n = sigma_i.node(int(rng.integers(0, len(sigma_i))))

    result = path_switch(x_n, sigma_i, path_set.others(), BIG_BUDGET, make_context(world, robot, rng))

    for candidate in result.stats.pruned:
        assert candidate.lower_bound >= candidate.incumbent_cost - 1e-12
        assert candidate.lower_bound >= candidate.x_n.distance_to(candidate.x_j) - 1e-12
    assert result.path.cost <= sigma_i.subpath(x_n, sigma_i.goal).cost


@pytest.mark.parametrize("seed", range(10))
def test_empty_world_matches_brute_force(seed: int) -> None:
    _check_empty_world_equivalence(seed)


@pytest.mark.parametrize("seed", range(10))
def test_pruned_nodes_cannot_improve(seed: int) -> None:
    _check_pruning_admissible(seed)


@pytest.mark.slow
def test_empty_world_matches_brute_force_many() -> None:
    for seed in range(100, 300):
        _check_empty_world_equivalence(seed)


@pytest.mark.slow
def test_pruned_nodes_cannot_improve_many() -> None:
    for seed in range(100, 300):
        _check_pruning_admissible(seed)
