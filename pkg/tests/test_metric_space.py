import itertools

import numpy as np
import pytest

from src.lipschitz.exception import DimensionMismatchError, RegionCapError
from src.lipschitz.metric_space import (
    Arm, Metric, Region, candidate_grid, distance, refine_region, region_contains,
    sample_arm_in_region, uniform_grid_covering
)
from src.utils.enums import MetricKind, SampleMode


def interior_points(d: int, per_axis: int = 23) -> np.ndarray:
    # Off-dyadic points so no point sits on a region boundary
    axis = (np.arange(per_axis) + 0.37) / per_axis
    return np.array(list(itertools.product(axis, repeat=d)))


def test_distance_linf():
    assert distance(Arm.of(0.2, 0.4), Arm.of(0.5, 0.1), Metric()) == pytest.approx(0.3)


def test_distance_l2():
    assert distance(Arm.of(0, 0), Arm.of(0.3, 0.4), Metric(MetricKind.L2)) == pytest.approx(0.5)


@pytest.mark.parametrize("kind", list(MetricKind))
def test_distance_to_self_is_zero(kind):
    arm = Arm.of(0.1, 0.7)
    assert distance(arm, arm, Metric(kind)) == 0


def test_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        distance(Arm.of(0.1), Arm.of(0.1, 0.2), Metric())


def test_vectorised_distances_match_scalar():
    metric = Metric(MetricKind.L2)
    points = np.array([[0.0, 0.0], [1.0, 1.0], [0.3, 0.9]])
    expected = [distance(Arm.from_array(p), Arm.of(0.3, 0.5), metric) for p in points]
    assert metric.distances_to(points, np.array([0.3, 0.5])) == pytest.approx(expected)


def test_arm_outside_unit_cube_rejected():
    with pytest.raises(ValueError):
        Arm.of(1.2)


def test_covering_d1_depth1():
    covering = uniform_grid_covering(1, 1)
    assert [(r.lo, r.hi) for r in covering] == [((0.0,), (0.5,)), ((0.5,), (1.0,))]


def test_covering_d2_depth1_contains_lower_corner_box():
    covering = uniform_grid_covering(2, 1)
    assert len(covering) == 4
    assert Region(index=(0, 0), depth=1) in covering.regions


@pytest.mark.parametrize("d,depth", [(1, 4), (1, 6), (2, 3), (3, 2)])
def test_covering_partitions_unit_cube(d, depth):
    covering = uniform_grid_covering(d, depth)
    assert len(covering) == 2 ** (d * depth)
    for point in interior_points(d, per_axis=23 if d < 3 else 9):
        assert len(covering.locate(point)) == 1


def test_covering_respects_region_cap():
    with pytest.raises(RegionCapError):
        uniform_grid_covering(2, 11)


def test_region_ids_are_lexicographic():
    covering = uniform_grid_covering(2, 2)
    assert [region.id for region in covering] == list(range(16))


def test_refine_interval():
    children = refine_region(Region(index=(0,), depth=1))
    assert [(c.lo, c.hi) for c in children] == [((0.0,), (0.25,)), ((0.25,), (0.5,))]


def test_refine_unit_box_gives_depth_one_covering():
    children = refine_region(Region.unit(2))
    assert sorted(children, key=lambda r: r.id) == list(uniform_grid_covering(2, 1).regions)


def test_refined_children_partition_parent():
    parent = Region(index=(1, 2), depth=2)
    children = refine_region(parent)
    assert all(region_contains(parent, child) for child in children)
    for point in interior_points(2):
        inside_parent = parent.contains_point(point)
        assert sum(child.contains_point(point) for child in children) == int(inside_parent)


def test_region_contains():
    outer = Region(index=(0,), depth=1)
    assert region_contains(outer, Region(index=(2,), depth=3))
    assert not region_contains(outer, Region(index=(1,), depth=1))
    assert not region_contains(Region(index=(1,), depth=2), Region(index=(0,), depth=1))
    assert region_contains(outer, outer)


def test_region_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        region_contains(Region.unit(1), Region.unit(2))


def test_sample_center_mode(rng):
    arm = sample_arm_in_region(Region(index=(0,), depth=1), rng, SampleMode.CENTER)
    assert arm == Arm.of(0.25)


def test_sample_uniform_mode_stays_in_region(rng):
    region = Region(index=(3, 1), depth=2)
    samples = np.array([sample_arm_in_region(region, rng).coords for _ in range(20000)])
    assert np.all(samples >= np.asarray(region.lo))
    assert np.all(samples < np.asarray(region.hi))
    # Uniform on a side-0.25 box: per-axis std 0.25 / sqrt(12)
    bound = 3 * 0.25 / np.sqrt(12) / np.sqrt(len(samples))
    assert np.all(np.abs(samples.mean(axis=0) - np.asarray(region.center)) < bound)


def test_candidate_grid_is_inclusive_and_ordered():
    grid = candidate_grid(1, 2)
    assert grid[:, 0].tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    grid2 = candidate_grid(2, 1)
    assert grid2.tolist()[:3] == [[0.0, 0.0], [0.0, 0.5], [0.0, 1.0]]


@pytest.mark.parametrize("kind", list(MetricKind))
def test_metric_axioms_on_random_triples(kind, rng):
    metric = Metric(kind)
    points = rng.random((10000, 3, 2))
    for a, b, c in points:
        a, b, c = Arm.from_array(a), Arm.from_array(b), Arm.from_array(c)
        ab, bc, ac = distance(a, b, metric), distance(b, c, metric), distance(a, c, metric)
        assert ab >= 0 and distance(a, a, metric) == 0
        assert ab == distance(b, a, metric)
        assert ac <= ab + bc + 1e-12


def random_region(rng, d: int, max_depth: int) -> Region:
    depth = int(rng.integers(0, max_depth + 1))
    return Region(index=tuple(int(k) for k in rng.integers(0, 1 << depth, size=d)), depth=depth)


def test_region_contains_is_a_partial_order(rng):
    regions = [random_region(rng, 2, 3) for _ in range(300)]
    for a in regions:
        assert region_contains(a, a)
    for _ in range(20000):
        a, b, c = (regions[int(i)] for i in rng.integers(0, len(regions), size=3))
        if region_contains(a, b) and region_contains(b, a):
            assert a == b
        if region_contains(a, b) and region_contains(b, c):
            assert region_contains(a, c)


@pytest.mark.parametrize("depth", range(1, 7))
def test_three_dim_covering_partitions_the_cube(depth, rng):
    covering = uniform_grid_covering(3, depth)
    assert len(covering) == 2 ** (3 * depth)
    index = np.array([region.index for region in covering])
    assert len({region.id for region in covering}) == len(covering)
    lo = index * 2.0 ** -depth
    hi = lo + 2.0 ** -depth
    for point in rng.random((50, 3)):
        assert np.all((lo <= point) & (point < hi), axis=1).sum() == 1
