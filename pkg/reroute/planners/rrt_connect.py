from __future__ import annotations

import logging
from enum import Enum

import numpy as np
import numpy.typing as npt

from ..cspace import CollisionChecker, Configuration
from ..errors import ContractViolation, SamplingExhaustedError
from ..paths import Path
from ..timing import Stopwatch
from .sampling import Sampler
from .tree import Tree

__all__ = (
    "DEFAULT_STEP",
    "DEFAULT_MAX_ITERATIONS",
    "steer",
    "rrt_connect",
)


_log = logging.getLogger(__name__)


DEFAULT_STEP = 0.3
DEFAULT_MAX_ITERATIONS = 20_000


class _Extension(Enum):
    TRAPPED = 0
    ADVANCED = 1
    REACHED = 2


def steer(source: Configuration, target: Configuration, step: float) -> npt.NDArray[np.float64]:
    """Moves from ``source`` towards ``target`` by at most ``step``."""
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    offset = target - source
    length = float(np.linalg.norm(offset))
    if length <= step:
        return target.copy()
    return source + offset * (step / length)


def _extend(tree: Tree, target: Configuration, checker: CollisionChecker, step: float) -> tuple[_Extension, int]:
    nearest = tree.nearest(target)
    source = tree.vertex(nearest)
    new = steer(source, target, step)
    if np.array_equal(new, source):
        return _Extension.REACHED, nearest
    if not checker.segment_free(source, new):
        return _Extension.TRAPPED, nearest
    index = tree.add(new, nearest)
    return (_Extension.REACHED if np.array_equal(new, target) else _Extension.ADVANCED), index


def _connect(tree: Tree, target: Configuration, checker: CollisionChecker, step: float) -> tuple[_Extension, int]:
    status, index = _extend(tree, target, checker, step)
    while status is _Extension.ADVANCED:
        status, index = _extend(tree, target, checker, step)
    return status, index


def rrt_connect(
    start: Configuration,
    goal: Configuration,
    checker: CollisionChecker,
    sampler: Sampler,
    rng: np.random.Generator,
    *,
    stopwatch: Stopwatch,
    max_time: float,
    step: float = DEFAULT_STEP,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> Path | None:
    """Finds a collision-free path between two configurations with bidirectional trees.

    The straight segment is tried first. Otherwise one tree takes a step towards a sample and
    the other greedily connects to the new vertex; the trees then swap roles.

    Parameters
    ----------
    start : Configuration
        The first configuration.
    goal : Configuration
        The last configuration.
    checker : CollisionChecker
        The collision checker, charged to ``stopwatch`` for metered runs.
    sampler : Sampler
        Where samples are drawn from.
    rng : np.random.Generator
        The random generator.
    stopwatch : Stopwatch
        The time source.
    max_time : float
        Seconds of ``stopwatch`` time allowed from now.
    step : float, optional
        The steering step, by default 0.3.
    max_iterations : int, optional
        An iteration cap, by default 20000.

    Returns
    -------
    Path | None
        A feasible path from ``start`` to ``goal``, or None when the budget ran out.

    Raises
    ------
    ContractViolation
        ``start`` or ``goal`` is in collision.
    """
    deadline = stopwatch.elapsed() + max_time
    if not checker.config_free(start):
        raise ContractViolation("The start configuration is in collision.")
    if not checker.config_free(goal):
        raise ContractViolation("The goal configuration is in collision.")
    if checker.segment_free(start, goal):
        return Path([start, goal])

    trees = (Tree(start), Tree(goal))
    forward = True
    for iteration in range(max_iterations):
        if stopwatch.elapsed() >= deadline:
            _log.debug("RRT-Connect ran out of time after %d iterations", iteration)
            return None
        stopwatch.charge_iterations()

        grow, other = (trees[0], trees[1]) if forward else (trees[1], trees[0])
        try:
            sample = sampler(rng)
        except SamplingExhaustedError:
            _log.debug("RRT-Connect could not draw a sample")
            return None

        status, new = _extend(grow, sample, checker, step)
        if status is not _Extension.TRAPPED:
            reached, meet = _connect(other, grow.vertex(new), checker, step)
            if reached is _Extension.REACHED:
                a, b = (new, meet) if forward else (meet, new)
                head = trees[0].branch(a)
                tail = trees[1].branch(b)[::-1]
                return Path(np.concatenate((head, tail), axis=0))
        forward = not forward

    _log.debug("RRT-Connect hit the iteration cap of %d", max_iterations)
    return None
