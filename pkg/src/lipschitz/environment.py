"""
File:           environment.py
Author:         Dibyaranjan Sathua
Created on:     29/07/22, 7:55 pm

Expected-reward functions, the Gaussian noise channel and the ground-truth optimum
used for regret accounting.
"""
from typing import Callable, Dict, Optional, Tuple
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import math

import numpy as np

from src.lipschitz.constant import OptimumSearch
from src.lipschitz.exception import DimensionMismatchError, LipschitzBanditError
from src.lipschitz.metric_space import Arm, Metric
from src.utils.enums import MetricKind, OptimumMethod, RewardKind
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("environment")

# Grid searches above this many points fall back to a coarser resolution
MAX_GRID_POINTS: int = 2_000_000


class RewardFunction(ABC):
    """ Expected reward mu over [0, 1]^dim """
    KIND: RewardKind = RewardKind.CUSTOM

    def __init__(self, dim: int, lipschitz: float = 1.0):
        self.dim: int = dim
        self.lipschitz: float = lipschitz

    @property
    def kind(self) -> RewardKind:
        return self.KIND

    @abstractmethod
    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """ mu at every row of an (n x dim) array """
        pass

    def closed_form_optimum(self) -> Optional[Tuple[Arm, float]]:
        return None

    def __call__(self, arm: Arm) -> float:
        return mean_reward(self, arm)

    def __repr__(self):
        return f"{self.__class__.__name__}(dim={self.dim})"


class TriangleReward(RewardFunction):
    """ mu(x) = 0.9 - 0.95 |x - 1/3| """
    KIND = RewardKind.TRIANGLE

    def __init__(self):
        super(TriangleReward, self).__init__(dim=1, lipschitz=0.95)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return 0.9 - 0.95 * np.abs(points[:, 0] - 1.0 / 3.0)

    def closed_form_optimum(self) -> Optional[Tuple[Arm, float]]:
        return Arm.of(1.0 / 3.0), 0.9


class SineReward(RewardFunction):
    """ mu(x) = 2 / (3 pi) * sin(3 pi x / 2) """
    KIND = RewardKind.SINE

    def __init__(self):
        super(SineReward, self).__init__(dim=1, lipschitz=1.0)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return 2.0 / (3.0 * math.pi) * np.sin(1.5 * math.pi * points[:, 0])

    def closed_form_optimum(self) -> Optional[Tuple[Arm, float]]:
        return Arm.of(1.0 / 3.0), 2.0 / (3.0 * math.pi)


class TwoDimReward(RewardFunction):
    """ mu(x) = 1 - 0.8 ||x - (0.75, 0.75)||_2 - 0.4 ||x - (0, 1)||_2. Coefficients sum to 1.2 """
    KIND = RewardKind.TWO_DIM
    PEAK = np.array([0.75, 0.75])
    ANCHOR = np.array([0.0, 1.0])

    def __init__(self):
        super(TwoDimReward, self).__init__(dim=2, lipschitz=1.2)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        to_peak = np.linalg.norm(points - self.PEAK, axis=1)
        to_anchor = np.linalg.norm(points - self.ANCHOR, axis=1)
        return 1.0 - 0.8 * to_peak - 0.4 * to_anchor


class LowerBoundReward(RewardFunction):
    """
    Hard instance: [0, 1)^d split into (1/eps)^d cells of side eps. f_k is a pyramid of
    height eps / 2 on cell k (1-based, lexicographic) and zero elsewhere.
    """
    KIND = RewardKind.LOWER_BOUND

    def __init__(self, dim: int, epsilon: float, k: int):
        super(LowerBoundReward, self).__init__(dim=dim, lipschitz=1.0)
        cells_per_axis = int(math.floor(1.0 / epsilon + 1e-9))
        if cells_per_axis < 1:
            raise LipschitzBanditError(f"epsilon {epsilon} gives no cell")
        if not 1 <= k <= cells_per_axis ** dim:
            raise LipschitzBanditError(f"Cell index {k} outside 1..{cells_per_axis ** dim}")
        self.requested_epsilon: float = epsilon
        self.cells_per_axis: int = cells_per_axis
        self.epsilon: float = 1.0 / cells_per_axis
        self.k: int = k
        self.cell_index: Tuple[int, ...] = self._cell_coordinates(k - 1)
        self.center: np.ndarray = (np.asarray(self.cell_index) + 0.5) * self.epsilon

    def _cell_coordinates(self, rank: int) -> Tuple[int, ...]:
        coords = []
        for _ in range(self.dim):
            rank, value = divmod(rank, self.cells_per_axis)
            coords.append(value)
        return tuple(reversed(coords))

    @property
    def cell_count(self) -> int:
        return self.cells_per_axis ** self.dim

    def cell_center(self, k: int) -> Arm:
        return Arm.from_array((np.asarray(self._cell_coordinates(k - 1)) + 0.5) * self.epsilon)

    def in_target_cell(self, points: np.ndarray) -> np.ndarray:
        cells = np.floor(points * self.cells_per_axis).astype(int)
        inside_unit = np.all(points < 1.0, axis=1)
        return inside_unit & np.all(cells == np.asarray(self.cell_index), axis=1)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pyramid = self.epsilon / 2.0 - np.abs(points - self.center).max(axis=1)
        return np.where(self.in_target_cell(points), pyramid, 0.0)

    def closed_form_optimum(self) -> Optional[Tuple[Arm, float]]:
        return Arm.from_array(self.center), self.epsilon / 2.0


class CustomReward(RewardFunction):
    """ Wraps a user function of one point. The Lipschitz constant must be declared """

    def __init__(self, handle: Callable[[np.ndarray], float], dim: int, lipschitz: float):
        super(CustomReward, self).__init__(dim=dim, lipschitz=lipschitz)
        self._handle = handle

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.apply_along_axis(self._handle, 1, points).astype(float)


def make_reward(
        kind: RewardKind,
        dim: int = 1,
        epsilon: Optional[float] = None,
        k: int = 1
) -> RewardFunction:
    """ Factory for the built-in reward functions """
    if kind is RewardKind.TRIANGLE:
        return TriangleReward()
    if kind is RewardKind.SINE:
        return SineReward()
    if kind is RewardKind.TWO_DIM:
        return TwoDimReward()
    if kind is RewardKind.LOWER_BOUND:
        if epsilon is None:
            raise LipschitzBanditError("The lower-bound reward needs epsilon")
        return LowerBoundReward(dim=dim, epsilon=epsilon, k=k)
    raise LipschitzBanditError(f"Reward kind {kind} has no built-in factory")


@dataclass(frozen=True)
class NoiseModel:
    """ Zero-mean Gaussian noise with standard deviation sigma """
    sigma: float = 0.1

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"Noise sigma must be finite and >= 0, got {self.sigma}")

    def draw(self, rng: np.random.Generator) -> float:
        # Always consume one normal so seeded streams line up across sigma values
        return self.sigma * rng.standard_normal()


@dataclass(frozen=True)
class OptimumCertificate:
    arm_star: Arm
    mu_star: float
    method: OptimumMethod
    resolution: Optional[float] = None
    tolerance: float = 0.0


def mean_reward(f: RewardFunction, a: Arm) -> float:
    """ Exact expected reward of one arm """
    if a.dim != f.dim:
        raise DimensionMismatchError(f"Arm of dimension {a.dim} for a {f.dim}-d reward")
    return float(f.evaluate(np.asarray([a.coords], dtype=float))[0])


def draw_stochastic_reward(f: RewardFunction, noise: NoiseModel, a: Arm, rng: np.random.Generator) -> float:
    """ mu(a) + eta """
    return mean_reward(f, a) + noise.draw(rng)


def search_grid(dim: int, resolution: Optional[float] = None) -> Tuple[np.ndarray, float]:
    """ Inclusive evaluation grid on [0, 1]^dim and the resolution actually used """
    if resolution is None:
        resolution = {1: OptimumSearch.RESOLUTION_1D, 2: OptimumSearch.RESOLUTION_2D}.get(
            dim, OptimumSearch.RESOLUTION_HIGH_DIM
        )
    per_axis = int(round(1.0 / resolution)) + 1
    if per_axis ** dim > MAX_GRID_POINTS:
        per_axis = max(2, int(MAX_GRID_POINTS ** (1.0 / dim)))
        logger.warning(f"Grid search for d={dim} coarsened to {per_axis} points per axis")
    axis = np.linspace(0.0, 1.0, per_axis)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1), 1.0 / (per_axis - 1)


def optimal_value(
        f: RewardFunction,
        metric: Metric = Metric(),
        resolution: Optional[float] = None
) -> OptimumCertificate:
    """ Closed form where known, otherwise a certified grid search """
    closed = f.closed_form_optimum()
    if closed is not None:
        arm, value = closed
        return OptimumCertificate(arm_star=arm, mu_star=value, method=OptimumMethod.CLOSED_FORM)
    points, used = search_grid(f.dim, resolution)
    values = f.evaluate(points)
    best = int(np.argmax(values))
    # Every point lies within `used` of a grid point in both metrics for d <= 2 on an L_INF grid
    spread = used if metric.kind is MetricKind.L_INF else used * math.sqrt(f.dim)
    return OptimumCertificate(
        arm_star=Arm.from_array(points[best]),
        mu_star=float(values[best]),
        method=OptimumMethod.GRID_SEARCH,
        resolution=used,
        tolerance=f.lipschitz * spread,
    )


def worst_value(f: RewardFunction, resolution: Optional[float] = None) -> float:
    """ Grid estimate of min mu over [0, 1]^dim """
    points, _ = search_grid(f.dim, resolution)
    return float(f.evaluate(points).min())


def measured_lipschitz(
        f: RewardFunction,
        metric: Metric,
        rng: np.random.Generator,
        pairs: int = 10000
) -> float:
    """ Largest |mu(a) - mu(b)| / D(a, b) over random pairs """
    a = rng.random((pairs, f.dim))
    b = rng.random((pairs, f.dim))
    diff = np.abs(a - b)
    dist = diff.max(axis=1) if metric.kind is MetricKind.L_INF else np.sqrt((diff ** 2).sum(axis=1))
    gaps = np.abs(f.evaluate(a) - f.evaluate(b))
    mask = dist > 0
    return float((gaps[mask] / dist[mask]).max())


@dataclass
class Environment:
    """ Reward function, noise and metric of one run, with cached oracle quantities """
    reward: RewardFunction
    noise: NoiseModel
    metric: Metric
    _cache: Dict[str, object] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.reward.dim

    @property
    def optimum(self) -> OptimumCertificate:
        if "optimum" not in self._cache:
            self._cache["optimum"] = optimal_value(self.reward, self.metric)
        return self._cache["optimum"]

    @property
    def worst(self) -> float:
        if "worst" not in self._cache:
            self._cache["worst"] = worst_value(self.reward)
        return self._cache["worst"]

    def extremes_outside(self, lo: Tuple[float, ...], hi: Tuple[float, ...]) -> Tuple[float, float]:
        """ (min mu, max mu) over grid points outside the closed box [lo, hi] """
        key = f"outside:{lo}:{hi}"
        if key not in self._cache:
            points, _ = search_grid(self.dim)
            inside = np.all((points >= np.asarray(lo)) & (points <= np.asarray(hi)), axis=1)
            values = self.reward.evaluate(points[~inside])
            self._cache[key] = (float(values.min()), float(values.max())) if values.size else (0.0, 0.0)
        return self._cache[key]

    def mean(self, arm: Arm) -> float:
        return mean_reward(self.reward, arm)

    def means(self, points: np.ndarray) -> np.ndarray:
        return self.reward.evaluate(points)

    def pull(self, arm: Arm, rng: np.random.Generator) -> Tuple[float, float]:
        """ Expected reward and the raw stochastic observation of one pull """
        mu = self.mean(arm)
        return mu, mu + self.noise.draw(rng)

    def regret(self, arm: Arm) -> float:
        return self.optimum.mu_star - self.mean(arm)
