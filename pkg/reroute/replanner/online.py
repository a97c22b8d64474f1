from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from ..errors import ContractViolation
from ..paths import CollisionReport, Node, Path, PathSet
from .budget import BudgetMode, CycleTimeTracker, TimeBudget, cycle_gate
from .path_switch import PlanningContext, SwitchStats, path_switch

__all__ = (
    "ReplanOutcome",
    "current_remainder",
    "informed_online_replanning",
)


_log = logging.getLogger(__name__)


class ReplanOutcome(NamedTuple):
    """The result of one re-planning invocation.

    Attributes
    ----------
    path : Path
        The re-planned path from the robot configuration to the goal. Infinite cost when the
        current path was obstructed and nothing feasible was found.
    elapsed : float
        The stopwatch time spent, in seconds.
    improved : bool
        Whether ``path`` is cheaper than the current path was.
    mode : BudgetMode
        The budget mode of the invocation.
    current_length : float
        The geometric length of the current path at call time.
    stats : SwitchStats
        The counters of every switching search run.
    mean_cycle : float
        The mean duration of the switching searches that found a feasible path, in seconds; 0 when
        none did.
    """

    path: Path
    elapsed: float
    improved: bool
    mode: BudgetMode
    current_length: float
    stats: SwitchStats
    mean_cycle: float = 0.0

    @property
    def feasible(self) -> bool:
        """bool: Whether the re-planned path can be executed."""
        return self.path.is_feasible


def current_remainder(path_set: PathSet, x_h: Node) -> Path:
    """Returns the unflagged part of the current path from ``x_h`` to the goal.

    Collision reports passed to :func:`informed_online_replanning` must index the edges of this path.
    """
    return path_set.current.cleared().subpath(x_h, path_set.goal)


def informed_online_replanning(
    path_set: PathSet,
    x_h: Node,
    budget: TimeBudget,
    report: CollisionReport,
    context: PlanningContext,
) -> ReplanOutcome:
    """Re-plans the remainder of the current path within the budget.

    Start nodes are taken farthest-along first (closest to the goal). Each one runs a switching
    search against the other paths and the reusable part of the current path; an improved
    incumbent offers its own unused nodes once the start nodes run out.

    Parameters
    ----------
    path_set : PathSet
        The available paths with their latest obstruction flags; the current one is being executed.
    x_h : Node
        The robot configuration, a point of the current path.
    budget : TimeBudget
        The time budget; its mode decides the time allowed.
    report : CollisionReport
        The latest verdict for the current path from ``x_h`` to the goal.
    context : PlanningContext
        The planning dependencies.

    Returns
    -------
    ReplanOutcome
        The re-planned path and the invocation metrics.
    """
    stopwatch = context.stopwatch
    started = stopwatch.elapsed()
    t_rp = budget.t_rp
    goal = path_set.goal

    sigma_cur = current_remainder(path_set, x_h).with_report(report)
    alternatives = path_set.others()
    if report.obstructed:
        after = report.after_index
        before = report.before_index
        if after is None or before is None:
            raise ContractViolation("An obstructed report must name the nodes around the obstruction.")
        alternatives.append(sigma_cur.slice(after, len(sigma_cur) - 1))
        queue = list(sigma_cur.nodes[: before + 1])
    else:
        alternatives.append(sigma_cur)
        queue = list(sigma_cur.nodes)

    incumbent = sigma_cur
    incumbent_cost = sigma_cur.cost
    used: set[Node] = set()
    stats = SwitchStats()
    tracker = CycleTimeTracker()
    goal_array = goal.array

    while queue and cycle_gate(tracker, t_rp - (stopwatch.elapsed() - started), math.isfinite(incumbent_cost)):
        distances = [float(np.linalg.norm(node.array - goal_array)) for node in queue]
        x_n = queue.pop(int(np.argmin(distances)))
        used.add(x_n)

        base = incumbent if incumbent.index_of(x_n) is not None else sigma_cur
        prefix = base.subpath(x_h, x_n)
        if not prefix.is_feasible:
            _log.debug("Skipping start node %s behind an obstruction", x_n)
        else:
            cycle_started = stopwatch.elapsed()
            t_max = t_rp - (cycle_started - started)
            result = path_switch(x_n, base, alternatives, t_max, context)
            stats.absorb(result.stats)
            if result.path.is_feasible:
                tracker.record(stopwatch.elapsed() - cycle_started)
                candidate = prefix.concat(result.path)
                if candidate.cost < incumbent_cost:
                    incumbent, incumbent_cost = candidate, candidate.cost
                    _log.debug("Incumbent improved to %.4f from start node %s", incumbent_cost, x_n)

        if not queue and incumbent is not sigma_cur:
            queue = [node for node in dict.fromkeys(incumbent.nodes) if node not in used]

    elapsed = stopwatch.elapsed() - started
    improved = incumbent_cost < sigma_cur.cost
    return ReplanOutcome(
        path=incumbent,
        elapsed=elapsed,
        improved=improved,
        mode=budget.mode,
        current_length=sigma_cur.length,
        stats=stats,
        mean_cycle=tracker.mean_duration,
    )
