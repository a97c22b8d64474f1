from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..cspace import CollisionChecker
from ..paths import EPS_MERGE, NODE_TOLERANCE, Node, Path, extended_sum
from ..planners import ConnectorSettings, SamplingBounds, plan_in_ellipsoid
from ..timing import Stopwatch
from .budget import CycleTimeTracker, cycle_gate

__all__ = (
    "PlanningContext",
    "PrunedCandidate",
    "SwitchStats",
    "SwitchResult",
    "prune_check",
    "path_switch",
)


_log = logging.getLogger(__name__)


@dataclass(slots=True)
class PlanningContext:
    """Everything a re-planning search needs besides its paths.

    Attributes
    ----------
    checker : CollisionChecker
        The collision checker bound to the planning snapshot.
    bounds : SamplingBounds
        The admissible configurations.
    rng : np.random.Generator
        The random generator.
    stopwatch : Stopwatch
        The time source, also charged by ``checker``.
    connector : ConnectorSettings
        The connector planner tuning.
    merge_threshold : float
        Candidate nodes closer than this to the last node a connection was tried to are skipped.
    """

    checker: CollisionChecker
    bounds: SamplingBounds
    rng: np.random.Generator
    stopwatch: Stopwatch
    connector: ConnectorSettings = field(default_factory=ConnectorSettings)
    merge_threshold: float = EPS_MERGE


class PrunedCandidate(NamedTuple):
    """A target node skipped because it cannot improve the incumbent.

    Attributes
    ----------
    x_n : Node
        The node the connection would start from.
    x_j : Node
        The skipped target node.
    lower_bound : float
        The straight-line distance plus the cost from ``x_j`` to the goal.
    incumbent_cost : float
        The incumbent cost when the node was skipped.
    """

    x_n: Node
    x_j: Node
    lower_bound: float
    incumbent_cost: float


@dataclass(slots=True)
class SwitchStats:
    """Counters describing a switching search.

    Attributes
    ----------
    cycles : int
        Connector planner calls; jumps onto a coinciding node are not counted.
    successful_cycles : int
        Calls that produced a feasible connector.
    improvements : int
        Connectors that improved the incumbent.
    pruned : list[PrunedCandidate]
        Target nodes skipped by the pruning test.
    merged : int
        Target nodes skipped for lying too close to the last node a connection was tried to.
    """

    cycles: int = 0
    successful_cycles: int = 0
    improvements: int = 0
    pruned: list[PrunedCandidate] = field(default_factory=list)
    merged: int = 0

    def absorb(self, other: SwitchStats) -> None:
        """Adds the counters of another search to these."""
        self.cycles += other.cycles
        self.successful_cycles += other.successful_cycles
        self.improvements += other.improvements
        self.pruned.extend(other.pruned)
        self.merged += other.merged


class SwitchResult(NamedTuple):
    """The outcome of a switching search.

    Attributes
    ----------
    path : Path
        The best path found from the start node to the goal; infinite cost when none is feasible.
    stats : SwitchStats
        What the search did.
    """

    path: Path
    stats: SwitchStats


def prune_check(x_n: Node, x_j: Node, best_cost: float, goal_tail_cost: float) -> bool:
    """Decides whether a target node can still improve the incumbent.

    Parameters
    ----------
    x_n : Node
        The node to connect from.
    x_j : Node
        The candidate target node.
    best_cost : float
        The incumbent cost from ``x_n`` to the goal; may be infinite.
    goal_tail_cost : float
        The cost from ``x_j`` to the goal along its path.

    Returns
    -------
    bool
        True when the straight-line distance is below the cost the connection may use.
    """
    if math.isinf(best_cost):
        return True
    if math.isinf(goal_tail_cost):
        return False
    return x_n.distance_to(x_j) < best_cost - goal_tail_cost


def _candidate_order(x_n: Node, path: Path) -> list[int]:
    distances = np.linalg.norm(path.waypoints - x_n.array, axis=1)
    return sorted(range(len(path)), key=lambda k: (float(distances[k]), k))


def path_switch(
    x_n: Node,
    sigma_i: Path,
    alternatives: Sequence[Path],
    max_time: float,
    context: PlanningContext,
) -> SwitchResult:
    """Looks for a cheaper way to the goal from a node by jumping onto other paths.

    For every alternative path, its nodes are visited nearest first. A node is tried when the
    straight-line distance leaves room under the incumbent cost; the connector must then beat
    the incumbent cost minus the alternative's remaining cost from that node.

    Parameters
    ----------
    x_n : Node
        A node of ``sigma_i``.
    sigma_i : Path
        The path the search starts on; its remainder from ``x_n`` is the first incumbent.
    alternatives : Sequence[Path]
        Paths ending at the goal, with their latest obstruction flags.
    max_time : float
        Seconds of ``context.stopwatch`` time allowed from now.
    context : PlanningContext
        The planning dependencies.

    Returns
    -------
    SwitchResult
        The cheapest path found and the search counters.
    """
    stopwatch = context.stopwatch
    deadline = stopwatch.elapsed() + max_time
    best = sigma_i.subpath(x_n, sigma_i.goal)
    best_cost = best.cost
    stats = SwitchStats()
    tracker = CycleTimeTracker()

    for sigma_j in alternatives:
        previous: Node | None = None
        tails = sigma_j.suffix_costs
        for index in _candidate_order(x_n, sigma_j):
            if stopwatch.elapsed() >= deadline:
                return SwitchResult(best, stats)

            x_j = sigma_j.node(index)
            if previous is not None and x_j.distance_to(previous) < context.merge_threshold:
                stats.merged += 1
                continue

            tail_cost = float(tails[index])
            if math.isinf(tail_cost) or not prune_check(x_n, x_j, best_cost, tail_cost):
                stats.pruned.append(PrunedCandidate(x_n, x_j, extended_sum(x_n.distance_to(x_j), tail_cost), best_cost))
                continue

            if not cycle_gate(tracker, deadline - stopwatch.elapsed(), math.isfinite(best_cost)):
                return SwitchResult(best, stats)

            previous = x_j
            tail = sigma_j.slice(index, len(sigma_j) - 1)
            if x_n.distance_to(x_j) <= NODE_TOLERANCE:
                connector: Path | None = Path([x_n.config])
            else:
                started = stopwatch.elapsed()
                stats.cycles += 1
                connector = plan_in_ellipsoid(
                    x_n.array,
                    x_j.array,
                    best_cost - tail_cost,
                    context.checker,
                    context.bounds,
                    context.rng,
                    stopwatch=stopwatch,
                    max_time=deadline - started,
                    settings=context.connector,
                )
                if connector is None:
                    continue
                stats.successful_cycles += 1
                tracker.record(stopwatch.elapsed() - started)

            candidate = connector.concat(tail, tolerance=NODE_TOLERANCE)
            if candidate.cost < best_cost:
                _log.debug("Switch from %s improved the cost from %.4f to %.4f", x_n, best_cost, candidate.cost)
                best, best_cost = candidate, candidate.cost
                stats.improvements += 1

    return SwitchResult(best, stats)
