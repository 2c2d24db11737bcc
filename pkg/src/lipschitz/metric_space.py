"""
File:           metric_space.py
Author:         Dibyaranjan Sathua
Created on:     28/07/22, 8:41 pm

Arms, distances and dyadic box regions on [0, 1]^d. Regions are stored with integer
grid coordinates so containment and refinement are exact.
"""
from typing import List, Tuple, Sequence, Union
from dataclasses import dataclass
import itertools

import numpy as np

from src.lipschitz.constant import Covering as CoveringConstant
from src.lipschitz.exception import DimensionMismatchError, RegionCapError
from src.utils import dyadic_side, lexicographic_rank
from src.utils.enums import MetricKind, SampleMode


@dataclass(frozen=True)
class Arm:
    coords: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise DimensionMismatchError("An arm needs at least one coordinate")
        for value in self.coords:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"Arm coordinate {value} is outside [0, 1]")

    @classmethod
    def of(cls, *coords: float) -> "Arm":
        return cls(tuple(float(x) for x in coords))

    @classmethod
    def from_array(cls, values: Union[np.ndarray, Sequence[float]]) -> "Arm":
        return cls(tuple(float(x) for x in values))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __str__(self):
        return "(" + ", ".join(f"{x:.6g}" for x in self.coords) + ")"


@dataclass(frozen=True)
class Metric:
    kind: MetricKind = MetricKind.L_INF

    def distance(self, a: Arm, b: Arm) -> float:
        return distance(a, b, self)

    def distances_to(self, points: np.ndarray, center: np.ndarray) -> np.ndarray:
        """ Distance from every row of `points` (n x d) to `center` """
        diff = np.abs(points - center)
        if self.kind is MetricKind.L_INF:
            return diff.max(axis=1)
        return np.sqrt((diff * diff).sum(axis=1))


def distance(a: Arm, b: Arm, metric: Metric) -> float:
    """ Distance between two arms under the given metric """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Arms have dimension {a.dim} and {b.dim}")
    diffs = [abs(x - y) for x, y in zip(a.coords, b.coords)]
    if metric.kind is MetricKind.L_INF:
        return max(diffs)
    return float(np.sqrt(sum(x * x for x in diffs)))


@dataclass(frozen=True)
class Region:
    """ Half-open dyadic box prod_i [index_i / 2^depth, (index_i + 1) / 2^depth) """
    index: Tuple[int, ...]
    depth: int

    def __post_init__(self):
        cells = 1 << self.depth
        if self.depth < 0 or any(not 0 <= k < cells for k in self.index):
            raise ValueError(f"Invalid dyadic region {self.index} at depth {self.depth}")

    @classmethod
    def unit(cls, d: int) -> "Region":
        return cls(index=(0,) * d, depth=0)

    @property
    def dim(self) -> int:
        return len(self.index)

    @property
    def side(self) -> float:
        return dyadic_side(self.depth)

    @property
    def lo(self) -> Tuple[float, ...]:
        return tuple(k * self.side for k in self.index)

    @property
    def hi(self) -> Tuple[float, ...]:
        return tuple((k + 1) * self.side for k in self.index)

    @property
    def center(self) -> Tuple[float, ...]:
        return tuple((k + 0.5) * self.side for k in self.index)

    @property
    def id(self) -> int:
        """ Lexicographic rank of the lower corner among regions of the same depth """
        return lexicographic_rank(self.index, 1 << self.depth)

    def contains_point(self, point: Sequence[float]) -> bool:
        return all(lo <= x < hi for lo, x, hi in zip(self.lo, point, self.hi))

    def __str__(self):
        return " x ".join(f"[{lo:g},{hi:g})" for lo, hi in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Covering:
    regions: Tuple[Region, ...]
    depth: int

    def __len__(self):
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)

    def locate(self, point: Sequence[float]) -> List[Region]:
        """ Regions holding the point. Exactly one for points of [0, 1)^d """
        return [region for region in self.regions if region.contains_point(point)]


def _check_cap(count: int, region_cap: int) -> None:
    if count > region_cap:
        raise RegionCapError(f"{count} regions requested, the cap is {region_cap}")


def uniform_grid_covering(
        d: int,
        depth: int,
        region_cap: int = CoveringConstant.REGION_CAP
) -> Covering:
    """ The 2^(d*depth) dyadic boxes of side 2^-depth tiling [0, 1)^d, lexicographic order """
    if d < 1 or depth < 0:
        raise ValueError(f"Need d >= 1 and depth >= 0, got d={d}, depth={depth}")
    _check_cap(2 ** (d * depth), region_cap)
    cells = range(1 << depth)
    regions = tuple(Region(index=index, depth=depth) for index in itertools.product(cells, repeat=d))
    return Covering(regions=regions, depth=depth)


def refine_region(region: Region) -> List[Region]:
    """ The 2^d children at depth + 1. Depends on the box alone, so layers refine alike """
    offsets = itertools.product((0, 1), repeat=region.dim)
    return [
        Region(index=tuple(2 * k + o for k, o in zip(region.index, offset)), depth=region.depth + 1)
        for offset in offsets
    ]


def region_contains(outer: Region, inner: Region) -> bool:
    """ True iff the box of `inner` is a subset of the box of `outer` """
    if outer.dim != inner.dim:
        raise DimensionMismatchError(f"Regions have dimension {outer.dim} and {inner.dim}")
    if inner.depth < outer.depth:
        return False
    shift = inner.depth - outer.depth
    return all((k >> shift) == o for k, o in zip(inner.index, outer.index))


def sample_arm_in_region(
        region: Region,
        rng: np.random.Generator,
        mode: SampleMode = SampleMode.UNIFORM
) -> Arm:
    """ Uniform draw from the half-open box, or its center """
    if mode is SampleMode.CENTER:
        return Arm(region.center)
    side = region.side
    lo = np.asarray(region.lo)
    point = lo + rng.random(region.dim) * side
    # random() is in [0, 1) but rounding may still land on the upper face
    point = np.minimum(point, np.nextafter(lo + side, lo))
    return Arm.from_array(point)


def candidate_grid(d: int, depth: int, region_cap: int = CoveringConstant.REGION_CAP) -> np.ndarray:
    """ Points k / 2^depth, k = 0..2^depth, on every axis, rows in lexicographic order """
    per_axis = (1 << depth) + 1
    _check_cap(per_axis ** d, region_cap)
    axis = np.arange(per_axis, dtype=float) * dyadic_side(depth)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)
