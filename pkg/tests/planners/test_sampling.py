from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reroute.errors import ContractViolation, EmptyRegionError, SamplingExhaustedError
from reroute.planners import InformedRegion, InformedSampler, SamplingBounds, sample_informed, sample_uniform


@pytest.fixture
def box() -> SamplingBounds:
    return SamplingBounds([-10.0, -10.0, -10.0], [10.0, 10.0, 10.0])


def test_uniform_samples_stay_in_bounds(rng: np.random.Generator) -> None:
    bounds = SamplingBounds([0.0, -1.0], [2.0, 1.0])
    samples = np.array([sample_uniform(bounds, rng) for _ in range(10_000)])
    assert np.all(samples >= bounds.lower) and np.all(samples <= bounds.upper)
    # The standard error of each coordinate mean is width / sqrt(12 n).
    assert_allclose(samples.mean(axis=0), [1.0, 0.0], atol=5 * 2 / np.sqrt(12 * 10_000))


def test_degenerate_bounds_give_their_point(rng: np.random.Generator) -> None:
    bounds = SamplingBounds([0.5, 0.5], [0.5, 0.5])
    assert_allclose(sample_uniform(bounds, rng), [0.5, 0.5])


def test_bounds_reject_inverted_corners() -> None:
    with pytest.raises(ContractViolation):
        SamplingBounds([1.0], [0.0])


def test_region_semi_axes() -> None:
    region = InformedRegion([0.0, 0.0, 0.0], [4.0, 0.0, 0.0], 5.0)
    assert_allclose(region.semi_axes, [2.5, 1.5, 1.5])


def test_informed_samples_satisfy_the_focal_sum(box: SamplingBounds, rng: np.random.Generator) -> None:
    region = InformedRegion([0.0, 0.0, 0.0], [4.0, 0.0, 0.0], 5.0)
    samples = np.array([sample_informed(region, box, rng) for _ in range(2_000)])
    assert np.all(region.focal_sums(samples) < 5.0)
    # The samples fill the ellipsoid rather than a thin slice of it.
    assert np.ptp(samples[:, 0]) > 4.0
    assert np.ptp(samples[:, 2]) > 2.0


def test_tight_region_concentrates_near_the_segment(box: SamplingBounds, rng: np.random.Generator) -> None:
    region = InformedRegion([0.0, 0.0, 0.0], [4.0, 0.0, 0.0], 4.0 + 1e-6)
    samples = np.array([sample_informed(region, box, rng) for _ in range(200)])
    assert np.all(region.focal_sums(samples) < region.cost_bound)
    assert np.max(np.abs(samples[:, 1:])) < 0.01


def test_region_as_tight_as_the_foci_is_empty(box: SamplingBounds, rng: np.random.Generator) -> None:
    region = InformedRegion([0.0, 0.0, 0.0], [4.0, 0.0, 0.0], 4.0)
    assert region.is_empty
    with pytest.raises(EmptyRegionError):
        sample_informed(region, box, rng)


def test_unbounded_region_samples_the_box(box: SamplingBounds, rng: np.random.Generator) -> None:
    region = InformedRegion([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], np.inf)
    assert box.contains(sample_informed(region, box, rng))


def test_region_outside_the_bounds_exhausts_the_budget(rng: np.random.Generator) -> None:
    region = InformedRegion([5.0, 5.0], [6.0, 5.0], 1.5)
    with pytest.raises(SamplingExhaustedError):
        sample_informed(region, SamplingBounds([0.0, 0.0], [1.0, 1.0]), rng, rejection_budget=64)


def test_sampler_only_tightens() -> None:
    sampler = InformedSampler(InformedRegion([0.0], [1.0], 3.0), SamplingBounds([-5.0], [5.0]))
    sampler.tighten(2.0)
    sampler.tighten(2.5)
    assert sampler.region.cost_bound == 2.0


def _random_regions(rng: np.random.Generator, count: int) -> list[InformedRegion]:
    regions = []
    for _ in range(count):
        d = int(rng.integers(2, 7))
        a = rng.uniform(-1.0, 1.0, d)
        b = rng.uniform(-1.0, 1.0, d)
        regions.append(InformedRegion(a, b, float(np.linalg.norm(b - a)) * rng.uniform(1.0001, 2.0)))
    return regions


@pytest.mark.slow
def test_informed_sampling_admissibility_over_many_regions(rng: np.random.Generator) -> None:
    for region in _random_regions(rng, 20):
        bounds = SamplingBounds(np.full(region.dimension, -10.0), np.full(region.dimension, 10.0))
        samples = np.array([sample_informed(region, bounds, rng) for _ in range(5_000)])
        assert np.all(region.focal_sums(samples) < region.cost_bound)
        with pytest.raises(EmptyRegionError):
            sample_informed(region.shrunk(region.focal_distance), bounds, rng)


def test_informed_sampling_admissibility_quick(rng: np.random.Generator) -> None:
    for region in _random_regions(rng, 20):
        bounds = SamplingBounds(np.full(region.dimension, -10.0), np.full(region.dimension, 10.0))
        samples = np.array([sample_informed(region, bounds, rng) for _ in range(100)])
        assert np.all(region.focal_sums(samples) < region.cost_bound)
