"""
File:           bob.py
Author:         Dibyaranjan Sathua
Created on:     10/08/22, 11:37 am

Bandit-over-bandit Robust Zooming. The horizon is cut into batches of length H. At the
start of each batch an EXP3.P master picks a corruption-budget guess 2^i and a Robust
Zooming base runs with it for the whole batch. The batch's summed observations, scaled
down by the high-probability bound on their size, are the master's reward.
"""
from typing import Dict, List, Optional
from dataclasses import dataclass, field
import math

import numpy as np

from src.lipschitz.base_policy import BasePolicy
from src.lipschitz.constant import BoBDefaults, ZoomingDefaults
from src.lipschitz.exception import PolicyStateError
from src.lipschitz.metric_space import Arm, Metric
from src.lipschitz.zooming import ZoomingPolicy
from src.utils.enums import PolicyKind
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("bob")


@dataclass
class Exp3PState:
    n_arms: int
    alpha: float
    gamma: float
    # Weights are stored as logs; only the played index ever moves
    log_weights: np.ndarray = None

    def __post_init__(self):
        if self.log_weights is None:
            self.log_weights = np.zeros(self.n_arms, dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_weights.max())

    @property
    def probabilities(self) -> np.ndarray:
        """ (1 - gamma) w_i / sum w + gamma / N """
        weights = self.weights
        return (1.0 - self.gamma) * weights / weights.sum() + self.gamma / self.n_arms

    def draw(self, rng: np.random.Generator) -> int:
        probabilities = self.probabilities
        index = int(np.searchsorted(np.cumsum(probabilities), rng.random(), side="right"))
        return min(index, self.n_arms - 1)


def exp3p_parameters(n_arms: int, horizon: int, delta: float):
    """ alpha = 2 sqrt(ln(3 N T / delta)), gamma = min(3/5, 2 sqrt(3 N ln N / (5 T))) """
    alpha = 2.0 * math.sqrt(math.log(3.0 * n_arms * horizon / delta))
    gamma = min(0.6, 2.0 * math.sqrt(3.0 * n_arms * math.log(n_arms) / (5.0 * horizon)))
    return alpha, gamma


def batch_length(horizon: int, dim: int) -> int:
    return max(1, int(math.floor(horizon ** ((dim + 2) / (dim + 4)))))


def reward_normaliser(batch: int, horizon: int, delta: float, sigma: float = 1.0) -> float:
    """ 2H + sigma sqrt(2H ln(12T / (H delta))); the noise part scales with sigma """
    return 2.0 * batch + sigma * math.sqrt(2.0 * batch * math.log(12.0 * horizon / (batch * delta)))


@dataclass
class BoBState:
    budgets: List[int]
    batch: int
    horizon: int
    delta: float
    dim: int
    exp3p: Exp3PState
    restart_each_batch: bool = BoBDefaults.RESTART_EACH_BATCH
    sigma: float = 1.0
    chosen: Optional[int] = None
    chosen_probability: float = 0.0
    current: Optional[ZoomingPolicy] = None
    s: float = 0.0
    batches_started: int = 0
    persistent: Dict[int, ZoomingPolicy] = field(default_factory=dict)

    @property
    def n_arms(self) -> int:
        return len(self.budgets)


def init_bob(
        horizon: int,
        delta: float,
        dim: int,
        restart_each_batch: bool = BoBDefaults.RESTART_EACH_BATCH,
        sigma: float = 1.0
) -> BoBState:
    if horizon < 2:
        raise PolicyStateError(f"BoB needs a horizon of at least 2, got {horizon}")
    n_arms = int(math.ceil(math.log2(horizon)))
    alpha, gamma = exp3p_parameters(n_arms, horizon, delta)
    state = BoBState(
        budgets=[2 ** i for i in range(1, n_arms + 1)],
        batch=batch_length(horizon, dim),
        horizon=horizon,
        delta=delta,
        dim=dim,
        exp3p=Exp3PState(n_arms=n_arms, alpha=alpha, gamma=gamma),
        restart_each_batch=restart_each_batch,
        sigma=sigma,
    )
    logger.info(
        f"BoB initialised with N={n_arms}, H={state.batch}, alpha={alpha:.4f}, gamma={gamma:.4f}, "
        f"restart={restart_each_batch}"
    )
    return state


def begin_batch(state: BoBState, rng: np.random.Generator, make_base) -> None:
    """ Draw i' from EXP3.P and hand the batch to Robust Zooming with C = 2^i' """
    probabilities = state.exp3p.probabilities
    chosen = state.exp3p.draw(rng)
    state.chosen = chosen
    state.chosen_probability = float(probabilities[chosen])
    budget = state.budgets[chosen]
    if state.restart_each_batch:
        state.current = make_base(budget)
    else:
        if chosen not in state.persistent:
            state.persistent[chosen] = make_base(budget)
        state.current = state.persistent[chosen]
    state.s = 0.0
    state.batches_started += 1
    if logger.is_debug():
        logger.debug(f"Batch {state.batches_started}: budget 2^{chosen + 1} with p={state.chosen_probability:.4f}")


def end_batch(state: BoBState) -> None:
    """ Normalise s and move the weight of the played index only """
    if state.chosen is None:
        raise PolicyStateError("end_batch called outside a batch")
    exp3p = state.exp3p
    p = state.chosen_probability
    s = state.s / (p * reward_normaliser(state.batch, state.horizon, state.delta, state.sigma))
    bonus = exp3p.alpha / (p * math.sqrt(exp3p.n_arms * state.horizon))
    exponent = exp3p.gamma / (3.0 * exp3p.n_arms) * (s + bonus)
    exponent = float(np.clip(exponent, -BoBDefaults.EXPONENT_CLAMP, BoBDefaults.EXPONENT_CLAMP))
    exp3p.log_weights[state.chosen] += exponent
    if logger.is_debug():
        logger.debug(f"Batch {state.batches_started} closed: s={s:.4f}, log-weight step {exponent:.6f}")
    state.chosen = None
    state.s = 0.0


class BoBPolicy(BasePolicy):
    POLICY_KIND = PolicyKind.BOB

    def __init__(
            self,
            horizon: int,
            delta: float,
            dim: int,
            rng: np.random.Generator,
            restart_each_batch: bool = BoBDefaults.RESTART_EACH_BATCH,
            capped: bool = ZoomingDefaults.CAPPED,
            sigma: float = 1.0,
            metric: Metric = Metric(),
            grid_depth: Optional[int] = None
    ):
        super(BoBPolicy, self).__init__(horizon=horizon, delta=delta, dim=dim)
        self.state: BoBState = init_bob(horizon, delta, dim, restart_each_batch, sigma)
        self._rng: np.random.Generator = rng
        self._base_params = dict(capped=capped, sigma=sigma, metric=metric, grid_depth=grid_depth)

    def _make_base(self, budget: int) -> ZoomingPolicy:
        return ZoomingPolicy(
            horizon=self.horizon, delta=self.delta / 3.0, dim=self.dim, budget=budget, **self._base_params
        )

    def select_arm(self) -> Arm:
        if self.t % self.state.batch == 0:
            begin_batch(self.state, self._rng, self._make_base)
        return self.state.current.select_arm()

    def update(self, arm: Arm, observation: float) -> None:
        if self.state.current is None or self.state.chosen is None:
            raise PolicyStateError("update called before select_arm")
        self.state.current.update(arm, observation)
        self.state.s += observation
        self.t += 1
        if self.t % self.state.batch == 0 or self.t == self.horizon:
            end_batch(self.state)

    def round_info(self) -> Dict[str, object]:
        info = {"batch": self.state.batches_started}
        if self.state.chosen is not None:
            info["budget"] = self.state.budgets[self.state.chosen]
        return info
