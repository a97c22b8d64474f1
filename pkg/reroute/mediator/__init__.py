from __future__ import annotations

from typing import TYPE_CHECKING, NamedTuple

from rayquaza import SingleResponseRequest

if TYPE_CHECKING:
    from ..cspace import WorldSnapshot
    from ..paths import CollisionReport, PathSet
    from ..replanner import TimeBudget


__all__ = (
    "ChannelNames",
    "GetCollisionVerdictRequest",
    "CollisionVerdictResult",
)


class ChannelNames:
    """The names of the mediator channels used by each service."""

    COLLISION = "collision"


# region: Collision Verdict


class CollisionVerdictResult(NamedTuple):
    """The latest verdict of the collision loop.

    Attributes
    ----------
    report : CollisionReport
        The report for the remainder of the current path.
    snapshot : WorldSnapshot
        The obstacles the verdict was computed against.
    path_set : PathSet
        The path set with every path flagged by its latest check.
    budget : TimeBudget
        The re-planning budget matching the verdict.
    checked_at : float
        The simulated time of the check, in seconds.
    """

    report: CollisionReport
    snapshot: WorldSnapshot
    path_set: PathSet
    budget: TimeBudget
    checked_at: float


class GetCollisionVerdictRequest(SingleResponseRequest[CollisionVerdictResult | None]):
    """Represents a request for the latest collision verdict.

    The result is None until the collision loop has completed its first check.
    """


# endregion
