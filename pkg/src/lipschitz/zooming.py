"""
File:           zooming.py
Author:         Dibyaranjan Sathua
Created on:     03/08/22, 10:14 pm

Zooming and Robust Zooming. The active space is tracked on a finite dyadic candidate
grid: `live` marks grid points outside every removed ball and `cover_count` counts the
confidence balls holding each point, so the activation check is a single vector scan.
"""
from typing import Dict, List, Optional, Tuple
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from src.lipschitz.base_policy import BasePolicy
from src.lipschitz.constant import ZoomingDefaults
from src.lipschitz.exception import InvariantViolationError, PolicyStateError
from src.lipschitz.metric_space import Arm, Metric, candidate_grid
from src.utils import lexicographic_rank
from src.utils.enums import PolicyKind
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("zooming")


def default_grid_depth(dim: int) -> int:
    if dim == 1:
        return ZoomingDefaults.GRID_DEPTH_1D
    if dim == 2:
        return ZoomingDefaults.GRID_DEPTH_2D
    return ZoomingDefaults.GRID_DEPTH_HIGH_DIM


@lru_cache(maxsize=8)
def _shared_grid(dim: int, depth: int) -> np.ndarray:
    grid = candidate_grid(dim, depth)
    grid.setflags(write=False)
    return grid


def robust_radius(
        n: int,
        horizon: int,
        delta: float,
        budget: float = 0.0,
        capped: bool = False,
        sigma: float = 1.0
) -> float:
    """ sigma * sqrt((4 ln T + 2 ln(2 / delta)) / n) + C / n, the second term optionally min(1, C / n) """
    if n < 1:
        raise PolicyStateError("The confidence radius is undefined before the first pull")
    stochastic = sigma * math.sqrt((4.0 * math.log(horizon) + 2.0 * math.log(2.0 / delta)) / n)
    corruption = budget / n
    if capped:
        corruption = min(1.0, corruption)
    return stochastic + corruption


@dataclass
class ActiveArmRecord:
    center: Arm
    n: int = 0
    f: float = 0.0


class ZoomingState:
    """ Active arms J, the active space on the candidate grid and the removed balls """

    def __init__(
            self,
            horizon: int,
            delta: float,
            dim: int,
            budget: float = 0.0,
            capped: bool = False,
            sigma: float = 1.0,
            metric: Metric = Metric(),
            grid_depth: Optional[int] = None
    ):
        self.horizon: int = horizon
        self.delta: float = delta
        self.dim: int = dim
        self.budget: float = budget
        self.capped: bool = capped
        self.sigma: float = sigma
        self.metric: Metric = metric
        self.grid_depth: int = default_grid_depth(dim) if grid_depth is None else grid_depth
        self.candidates: np.ndarray = _shared_grid(dim, self.grid_depth)
        size = len(self.candidates)
        self.live: np.ndarray = np.ones(size, dtype=bool)
        self.cover_count: np.ndarray = np.zeros(size, dtype=np.int32)
        self.active: np.ndarray = np.zeros(size, dtype=bool)
        self.pulls: np.ndarray = np.zeros(size, dtype=np.int64)
        self.means: np.ndarray = np.zeros(size, dtype=float)
        self.removed: List[Tuple[Arm, float]] = []
        self.pending: Optional[int] = None
        self._log_term: float = 4.0 * math.log(horizon) + 2.0 * math.log(2.0 / delta)

    # Radii
    def radii(self, pulls: np.ndarray) -> np.ndarray:
        """ Vectorised robust_radius for pull counts >= 1 """
        pulls = pulls.astype(float)
        corruption = self.budget / pulls
        if self.capped:
            corruption = np.minimum(1.0, corruption)
        return self.sigma * np.sqrt(self._log_term / pulls) + corruption

    def radius(self, n: int) -> float:
        return robust_radius(n, self.horizon, self.delta, self.budget, self.capped, self.sigma)

    # Book-keeping helpers
    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.active)

    def arm_at(self, index: int) -> Arm:
        return Arm.from_array(self.candidates[index])

    def index_of(self, arm: Arm) -> int:
        """ Grid index of an arm lying on the candidate grid """
        cells = 1 << self.grid_depth
        ticks = [int(round(x * cells)) for x in arm.coords]
        index = lexicographic_rank(ticks, cells + 1)
        if len(arm.coords) != self.dim or not np.array_equal(self.candidates[index], arm.as_array()):
            raise PolicyStateError(f"Arm {arm} is not on the candidate grid")
        return index

    def ball_mask(self, index: int, radius: float) -> np.ndarray:
        distances = self.metric.distances_to(self.candidates, self.candidates[index])
        return distances <= radius

    def is_covered(self) -> bool:
        """ Every live grid point lies in some confidence ball """
        return not np.any(self.live & (self.cover_count == 0))

    # Algorithm steps
    def removal_step(self) -> List[Tuple[Arm, float]]:
        """
        Drop every active u with f(v) - f(u) >= r(v) + 2 r(u) for some active v and take
        B(u, r(u)) out of the active space. Repeats until no pair fires.
        """
        removed: List[Tuple[Arm, float]] = []
        while True:
            indices = self.active_indices()
            if len(indices) < 2:
                return removed
            f = self.means[indices]
            r = self.radii(self.pulls[indices])
            best_lower = np.max(f - r)
            doomed = indices[best_lower >= f + 2.0 * r]
            if len(doomed) == 0:
                return removed
            for index, radius in zip(doomed, self.radii(self.pulls[doomed])):
                mask = self.ball_mask(index, radius)
                self.live &= ~mask
                self.cover_count -= mask
                self.active[index] = False
                ball = (self.arm_at(index), float(radius))
                self.removed.append(ball)
                removed.append(ball)
                if logger.is_debug():
                    logger.debug(f"Removed arm {ball[0]} with radius {radius:.4f}")

    def activation_step(self) -> Optional[ActiveArmRecord]:
        """ Activate the lexicographically first live grid point outside all confidence balls """
        if not self.live.any() and not self.active.any():
            raise InvariantViolationError("Active space is empty and no arm is active")
        uncovered = self.live & (self.cover_count == 0)
        index = int(np.argmax(uncovered))
        if not uncovered[index]:
            return None
        self.active[index] = True
        self.pulls[index] = 0
        self.means[index] = 0.0
        self.pending = index
        if logger.is_debug():
            logger.debug(f"Activated arm {self.arm_at(index)}")
        return ActiveArmRecord(center=self.arm_at(index))

    def selection_step(self) -> Arm:
        """ argmax of f(v) + 2 r(v), ties to the lexicographically smallest center """
        indices = self.active_indices()
        if len(indices) == 0:
            raise PolicyStateError("Selection with no active arm")
        index_values = self.means[indices] + 2.0 * self.radii(self.pulls[indices])
        # flatnonzero is sorted, so argmax picks the smallest grid index among ties
        return self.arm_at(int(indices[int(np.argmax(index_values))]))

    def update(self, arm: Arm, y: float) -> None:
        """ n += 1 then f = (f (n - 1) + y) / n; the arm's ball shrinks accordingly """
        index = self.index_of(arm)
        if not self.active[index]:
            raise PolicyStateError(f"Arm {arm} is not active")
        n_old = int(self.pulls[index])
        n_new = n_old + 1
        self.pulls[index] = n_new
        self.means[index] = (self.means[index] * n_old + y) / n_new
        distances = self.metric.distances_to(self.candidates, self.candidates[index])
        new_mask = distances <= self.radius(n_new)
        if n_old > 0:
            self.cover_count -= distances <= self.radius(n_old)
        self.cover_count += new_mask
        if self.pending == index:
            self.pending = None


class ZoomingPolicy(BasePolicy):
    """
    Zooming with budget 0, Robust Zooming with a known budget C. One pull per round:
    either the arm activated this round or the selection-rule arm.
    """
    POLICY_KIND = PolicyKind.ROBUST_ZOOMING

    def __init__(
            self,
            horizon: int,
            delta: float,
            dim: int,
            budget: float = 0.0,
            capped: bool = ZoomingDefaults.CAPPED,
            sigma: float = 1.0,
            metric: Metric = Metric(),
            grid_depth: Optional[int] = None,
            kind: Optional[PolicyKind] = None
    ):
        super(ZoomingPolicy, self).__init__(horizon=horizon, delta=delta, dim=dim, kind=kind)
        self.state: ZoomingState = ZoomingState(
            horizon=horizon,
            delta=delta,
            dim=dim,
            budget=budget,
            capped=capped,
            sigma=sigma,
            metric=metric,
            grid_depth=grid_depth,
        )
        self._last_step: str = ""

    @property
    def budget(self) -> float:
        return self.state.budget

    def select_arm(self) -> Arm:
        self.state.removal_step()
        activated = self.state.activation_step()
        if activated is not None:
            self._last_step = "activation"
            return activated.center
        self._last_step = "selection"
        return self.state.selection_step()

    def update(self, arm: Arm, observation: float) -> None:
        self.state.update(arm, observation)
        self.t += 1

    def round_info(self) -> Dict[str, object]:
        return {"step": self._last_step, "active_arms": int(self.state.active.sum())}
