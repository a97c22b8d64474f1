from __future__ import annotations

import logging
from enum import StrEnum

import numpy as np

from ..cspace import CollisionChecker, Configuration
from ..paths import Path
from ..timing import Stopwatch
from .rrt_connect import DEFAULT_MAX_ITERATIONS, DEFAULT_STEP, rrt_connect
from .rrt_star import rrt_star_optimize
from .sampling import DEFAULT_REJECTION_BUDGET, InformedRegion, InformedSampler, SamplingBounds
from .shortcut import shortcut

__all__ = (
    "ConnectorKind",
    "ConnectorSettings",
    "plan_in_ellipsoid",
)


_log = logging.getLogger(__name__)


class ConnectorKind(StrEnum):
    """The planner used to connect two nodes inside an informed region."""

    RRT_CONNECT = "rrt_connect"
    RRT_STAR = "rrt_star"


class ConnectorSettings:
    """Tuning of the connector planner.

    Attributes
    ----------
    kind : ConnectorKind
        The planner to run.
    step : float
        The steering step.
    max_iterations : int
        The iteration cap per call.
    rejection_budget : int
        Draws allowed per informed sample.
    shortcut_attempts : int
        Random shortcut attempts applied to every connector.
    """

    __slots__ = ("kind", "step", "max_iterations", "rejection_budget", "shortcut_attempts")

    def __init__(
        self,
        kind: ConnectorKind = ConnectorKind.RRT_CONNECT,
        *,
        step: float = DEFAULT_STEP,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        rejection_budget: int = DEFAULT_REJECTION_BUDGET,
        shortcut_attempts: int = 20,
    ) -> None:
        self.kind: ConnectorKind = ConnectorKind(kind)
        self.step: float = step
        self.max_iterations: int = max_iterations
        self.rejection_budget: int = rejection_budget
        self.shortcut_attempts: int = shortcut_attempts

    def __repr__(self) -> str:
        return f"<ConnectorSettings kind={self.kind} step={self.step}>"


def plan_in_ellipsoid(
    x_n: Configuration,
    x_j: Configuration,
    cost_bound: float,
    checker: CollisionChecker,
    bounds: SamplingBounds,
    rng: np.random.Generator,
    *,
    stopwatch: Stopwatch,
    max_time: float,
    settings: ConnectorSettings | None = None,
) -> Path | None:
    """Connects two configurations with a path cheaper than ``cost_bound``.

    Samples are drawn only from the informed region of the two nodes, so every waypoint of
    a returned path lies inside it.

    Parameters
    ----------
    x_n : Configuration
        The node to connect from.
    x_j : Configuration
        The node to connect to.
    cost_bound : float
        The connector must cost strictly less than this.
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
    settings : ConnectorSettings | None, optional
        The connector tuning; defaults to RRT-Connect.

    Returns
    -------
    Path | None
        The connector, or None when the region is empty, an endpoint is in collision, or
        nothing cheap enough was found in time.
    """
    settings = settings or ConnectorSettings()
    deadline = stopwatch.elapsed() + max_time
    region = InformedRegion(x_n, x_j, cost_bound)
    if region.is_empty or max_time <= 0:
        return None
    if not checker.config_free(x_n) or not checker.config_free(x_j):
        return None

    sampler = InformedSampler(region, bounds, rejection_budget=settings.rejection_budget)
    connector = rrt_connect(
        x_n,
        x_j,
        checker,
        sampler,
        rng,
        stopwatch=stopwatch,
        max_time=deadline - stopwatch.elapsed(),
        step=settings.step,
        max_iterations=settings.max_iterations,
    )
    if connector is None:
        return None

    connector = shortcut(connector, checker, rng, attempts=settings.shortcut_attempts)
    if settings.kind is ConnectorKind.RRT_STAR and connector.cost < cost_bound and len(connector) > 2:
        connector = rrt_star_optimize(
            connector,
            checker,
            bounds,
            rng,
            stopwatch=stopwatch,
            max_time=deadline - stopwatch.elapsed(),
            step=settings.step,
            max_iterations=settings.max_iterations,
        )

    if connector.cost >= cost_bound:
        _log.debug("Connector of cost %.4f does not beat the bound %.4f", connector.cost, cost_bound)
        return None
    return connector
