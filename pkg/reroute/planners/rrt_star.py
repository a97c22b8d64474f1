from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.special import gamma as gamma_function

from ..cspace import CollisionChecker
from ..errors import ContractViolation, EmptyRegionError, SamplingExhaustedError
from ..paths import Path
from ..timing import Stopwatch
from .rrt_connect import DEFAULT_MAX_ITERATIONS, DEFAULT_STEP, steer
from .sampling import InformedRegion, InformedSampler, SamplingBounds
from .tree import Tree

__all__ = (
    "rewire_radius_constant",
    "rrt_star_optimize",
)


_log = logging.getLogger(__name__)


def rewire_radius_constant(bounds: SamplingBounds) -> float:
    """Returns the usual scale of the shrinking neighbourhood radius for a sampled box."""
    d = bounds.dimension
    unit_ball = math.pi ** (d / 2) / gamma_function(d / 2 + 1)
    volume = max(bounds.volume, 1e-12)
    return 2 * (1 + 1 / d) ** (1 / d) * (volume / unit_ball) ** (1 / d)


def rrt_star_optimize(
    path: Path,
    checker: CollisionChecker,
    bounds: SamplingBounds,
    rng: np.random.Generator,
    *,
    stopwatch: Stopwatch,
    max_time: float,
    step: float = DEFAULT_STEP,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    on_improvement: Callable[[Path], None] | None = None,
) -> Path:
    """Shortens a feasible path by growing an optimizing tree seeded with its waypoints.

    The waypoints become a chain rooted at the start, with the goal a vertex of it. Samples are
    drawn from the informed region of the current best cost; each new vertex picks the
    cheapest free parent among its neighbours and then offers itself as parent to them.

    Parameters
    ----------
    path : Path
        A feasible path.
    checker : CollisionChecker
        The collision checker.
    bounds : SamplingBounds
        The admissible configurations.
    rng : np.random.Generator
        The random generator.
    stopwatch : Stopwatch
        The time source.
    max_time : float
        Seconds of ``stopwatch`` time allowed from now.
    step : float, optional
        The steering step, by default 0.3.
    max_iterations : int, optional
        An iteration cap.
    on_improvement : Callable[[Path], None] | None, optional
        Called with every new best path.

    Returns
    -------
    Path
        A feasible path with the same endpoints and a cost no larger than the input's.
    """
    if not path.is_feasible:
        raise ContractViolation("Only a feasible path can be optimized.")
    deadline = stopwatch.elapsed() + max_time
    if max_time <= 0 or len(path) < 2:
        return path

    tree = Tree(path.waypoints[0])
    goal = 0
    for waypoint in path.waypoints[1:]:
        goal = tree.add(waypoint, goal)

    start = path.waypoints[0]
    end = path.waypoints[-1]
    sampler = InformedSampler(InformedRegion(start, end, tree.costs[goal]), bounds)
    radius_constant = rewire_radius_constant(bounds)
    best_cost = tree.costs[goal]
    d = tree.dimension

    for _ in range(max_iterations):
        if stopwatch.elapsed() >= deadline:
            break
        stopwatch.charge_iterations()

        sampler.tighten(best_cost)
        try:
            sample = sampler(rng)
        except EmptyRegionError:
            break
        except SamplingExhaustedError:
            continue

        nearest = tree.nearest(sample)
        new = steer(tree.vertex(nearest), sample, step)
        if not checker.config_free(new):
            continue

        n = len(tree) + 1
        radius = min(radius_constant * (math.log(n) / n) ** (1 / d), step)
        neighbours = tree.near(new, radius)
        if nearest not in neighbours:
            neighbours.append(nearest)

        # Cheapest free parent first.
        distances = {v: float(np.linalg.norm(new - tree.vertex(v))) for v in neighbours}
        parent = None
        for v in sorted(neighbours, key=lambda v: (tree.costs[v] + distances[v], v)):
            if checker.segment_free(tree.vertex(v), new):
                parent = v
                break
        if parent is None:
            continue
        index = tree.add(new, parent)

        for v in neighbours:
            if v == parent or tree.parents[v] == -1:
                continue
            if tree.costs[index] + distances[v] < tree.costs[v] - 1e-12 and checker.segment_free(new, tree.vertex(v)):
                tree.rewire(v, index)

        if tree.costs[goal] < best_cost:
            best_cost = tree.costs[goal]
            if on_improvement is not None:
                on_improvement(Path(tree.branch(goal)))

    if best_cost < path.cost:
        optimized = Path(tree.branch(goal))
        _log.debug("RRT* shortened a path from %.4f to %.4f", path.cost, optimized.cost)
        if optimized.cost <= path.cost:
            return optimized
    return path
