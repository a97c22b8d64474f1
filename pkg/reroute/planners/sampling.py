from __future__ import annotations

import math
from typing import Protocol

import numpy as np
import numpy.typing as npt

from ..cspace import Configuration, RobotModel
from ..errors import ContractViolation, EmptyRegionError, SamplingExhaustedError

__all__ = (
    "DEFAULT_REJECTION_BUDGET",
    "SamplingBounds",
    "InformedRegion",
    "Sampler",
    "UniformSampler",
    "InformedSampler",
    "sample_uniform",
    "sample_unit_ball",
    "sample_informed",
)


DEFAULT_REJECTION_BUDGET = 1000


class SamplingBounds:
    """The axis-aligned box of configuration space that planners sample from.

    Attributes
    ----------
    lower : npt.NDArray[np.float64]
        The lower corner.
    upper : npt.NDArray[np.float64]
        The upper corner.
    """

    __slots__ = ("lower", "upper")

    def __init__(self, lower: npt.ArrayLike, upper: npt.ArrayLike) -> None:
        lower = np.array(lower, dtype=np.float64)
        upper = np.array(upper, dtype=np.float64)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ContractViolation(f"Bounds need two vectors of one dimension, got {lower.shape} and {upper.shape}.")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ContractViolation("Bounds must be finite.")
        if np.any(lower > upper):
            raise ContractViolation("Every lower bound must be at most the matching upper bound.")
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.lower: npt.NDArray[np.float64] = lower
        self.upper: npt.NDArray[np.float64] = upper

    def __repr__(self) -> str:
        return f"<SamplingBounds lower={self.lower.tolist()} upper={self.upper.tolist()}>"

    @classmethod
    def for_robot(cls, robot: RobotModel) -> SamplingBounds:
        """Returns the joint limits of a serial chain as bounds."""
        if robot.is_point:
            raise ContractViolation("A point robot has no joint limits; declare bounds explicitly.")
        return cls(robot.joint_lower, robot.joint_upper)

    @property
    def dimension(self) -> int:
        """int: The configuration-space dimension."""
        return self.lower.shape[0]

    @property
    def volume(self) -> float:
        """float: The Lebesgue measure of the box."""
        return float(np.prod(self.upper - self.lower))

    def contains(self, q: Configuration) -> bool:
        """Returns whether ``q`` lies in the box, boundary included."""
        return bool(np.all(q >= self.lower) and np.all(q <= self.upper))


class InformedRegion:
    """The configurations that could lie on a path between two foci cheaper than a bound.

    This is the open hyper-ellipsoid of points whose distances to the foci sum to less than
    ``cost_bound``. It is empty when the bound does not exceed the focal distance.

    Attributes
    ----------
    focus_a : npt.NDArray[np.float64]
        The first focus.
    focus_b : npt.NDArray[np.float64]
        The second focus.
    cost_bound : float
        The largest admissible focal-distance sum (exclusive).
    """

    __slots__ = ("focus_a", "focus_b", "cost_bound", "focal_distance", "_rotation")

    def __init__(self, focus_a: npt.ArrayLike, focus_b: npt.ArrayLike, cost_bound: float) -> None:
        a = np.array(focus_a, dtype=np.float64)
        b = np.array(focus_b, dtype=np.float64)
        if a.ndim != 1 or a.shape != b.shape:
            raise ContractViolation(f"Foci must be vectors of one dimension, got {a.shape} and {b.shape}.")
        if math.isnan(cost_bound):
            raise ContractViolation("The cost bound must be a number.")
        self.focus_a: npt.NDArray[np.float64] = a
        self.focus_b: npt.NDArray[np.float64] = b
        self.cost_bound: float = float(cost_bound)
        self.focal_distance: float = float(np.linalg.norm(b - a))
        self._rotation: npt.NDArray[np.float64] | None = None

    def __repr__(self) -> str:
        return f"<InformedRegion focal_distance={self.focal_distance:.4f} cost_bound={self.cost_bound:.4f}>"

    @property
    def dimension(self) -> int:
        """int: The configuration-space dimension."""
        return self.focus_a.shape[0]

    @property
    def is_empty(self) -> bool:
        """bool: Whether no configuration satisfies the strict focal-sum inequality."""
        return self.cost_bound <= self.focal_distance

    @property
    def is_bounded(self) -> bool:
        """bool: Whether the cost bound is finite."""
        return math.isfinite(self.cost_bound)

    @property
    def center(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The midpoint of the foci."""
        return (self.focus_a + self.focus_b) / 2

    @property
    def semi_axes(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The transverse semi-axis followed by the ``d - 1`` equal conjugate semi-axes."""
        transverse = self.cost_bound / 2
        conjugate = math.sqrt(max(self.cost_bound**2 - self.focal_distance**2, 0.0)) / 2
        return np.array([transverse] + [conjugate] * (self.dimension - 1))

    @property
    def rotation(self) -> npt.NDArray[np.float64]:
        """npt.NDArray[np.float64]: The rotation taking the first axis onto the focal axis."""
        if self._rotation is None:
            d = self.dimension
            if self.focal_distance == 0.0:
                self._rotation = np.eye(d)
            else:
                a1 = (self.focus_b - self.focus_a) / self.focal_distance
                u, _, vh = np.linalg.svd(np.outer(a1, np.eye(d)[0]))
                signs = np.ones(d)
                signs[-1] = np.linalg.det(u) * np.linalg.det(vh)
                self._rotation = u @ np.diag(signs) @ vh
        return self._rotation

    def focal_sums(self, qs: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Returns the sum of distances to both foci for each configuration."""
        qs = np.atleast_2d(np.asarray(qs, dtype=np.float64))
        return np.linalg.norm(qs - self.focus_a, axis=1) + np.linalg.norm(qs - self.focus_b, axis=1)

    def contains(self, q: Configuration) -> bool:
        """Returns whether ``q`` satisfies the strict focal-sum inequality."""
        return bool(self.focal_sums(q)[0] < self.cost_bound)

    def shrunk(self, cost_bound: float) -> InformedRegion:
        """Returns the region with the same foci and a new bound."""
        return InformedRegion(self.focus_a, self.focus_b, cost_bound)


def sample_uniform(bounds: SamplingBounds, rng: np.random.Generator) -> Configuration:
    """Draws a configuration uniformly from ``bounds``."""
    return rng.uniform(bounds.lower, bounds.upper)


def sample_unit_ball(dimension: int, rng: np.random.Generator, count: int = 1) -> npt.NDArray[np.float64]:
    """Draws ``count`` points uniformly from the unit ball, shape ``(count, dimension)``."""
    directions = rng.standard_normal((count, dimension))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.random(count) ** (1.0 / dimension)
    return directions * radii[:, None]


def sample_informed(
    region: InformedRegion,
    bounds: SamplingBounds,
    rng: np.random.Generator,
    *,
    rejection_budget: int = DEFAULT_REJECTION_BUDGET,
) -> Configuration:
    """Draws a configuration from the part of ``region`` inside ``bounds``.

    Points are drawn from the unit ball and mapped onto the ellipsoid, then rejected if they
    fall outside the bounds or, through rounding, on the ellipsoid surface. An unbounded
    region falls back to uniform sampling of the bounds.

    Parameters
    ----------
    region : InformedRegion
        The region to sample.
    bounds : SamplingBounds
        The admissible configurations.
    rng : np.random.Generator
        The random generator.
    rejection_budget : int, optional
        The number of draws allowed before giving up, by default 1000.

    Returns
    -------
    Configuration
        A configuration with focal-distance sum strictly below the bound, inside ``bounds``.

    Raises
    ------
    EmptyRegionError
        The cost bound does not exceed the focal distance.
    SamplingExhaustedError
        No draw landed inside ``bounds`` within the rejection budget.
    """
    if region.dimension != bounds.dimension:
        raise ContractViolation(f"Region dimension {region.dimension} differs from bounds dimension {bounds.dimension}.")
    if region.is_empty:
        raise EmptyRegionError(f"Cost bound {region.cost_bound:.6g} does not exceed the focal distance {region.focal_distance:.6g}.")
    if not region.is_bounded:
        return sample_uniform(bounds, rng)

    transform = region.rotation * region.semi_axes[None, :]
    center = region.center
    drawn = 0
    while drawn < rejection_budget:
        count = min(32, rejection_budget - drawn)
        drawn += count
        candidates = sample_unit_ball(region.dimension, rng, count) @ transform.T + center
        accepted = (
            (region.focal_sums(candidates) < region.cost_bound)
            & np.all(candidates >= bounds.lower, axis=1)
            & np.all(candidates <= bounds.upper, axis=1)
        )
        hits = np.flatnonzero(accepted)
        if hits.size:
            return candidates[hits[0]]
    raise SamplingExhaustedError(f"No informed sample inside the bounds after {rejection_budget} draws.")


class Sampler(Protocol):
    """Draws configurations for a planner."""

    def __call__(self, rng: np.random.Generator) -> Configuration: ...


class UniformSampler:
    """Samples a box uniformly."""

    def __init__(self, bounds: SamplingBounds) -> None:
        self.bounds: SamplingBounds = bounds

    def __call__(self, rng: np.random.Generator) -> Configuration:
        return sample_uniform(self.bounds, rng)


class InformedSampler:
    """Samples the intersection of an informed region and a box.

    Attributes
    ----------
    region : InformedRegion
        The current region; replace it to tighten the bound.
    bounds : SamplingBounds
        The admissible configurations.
    rejection_budget : int
        Draws allowed per sample.
    """

    def __init__(self, region: InformedRegion, bounds: SamplingBounds, *, rejection_budget: int = DEFAULT_REJECTION_BUDGET) -> None:
        self.region: InformedRegion = region
        self.bounds: SamplingBounds = bounds
        self.rejection_budget: int = rejection_budget

    def __call__(self, rng: np.random.Generator) -> Configuration:
        return sample_informed(self.region, self.bounds, rng, rejection_budget=self.rejection_budget)

    def tighten(self, cost_bound: float) -> None:
        """Shrinks the region to a lower cost bound."""
        if cost_bound < self.region.cost_bound:
            self.region = self.region.shrunk(cost_bound)
