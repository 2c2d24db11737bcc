"""
File:           presets.py
Author:         Dibyaranjan Sathua
Created on:     12/08/22, 5:48 pm

Named experiment grids: every reward, attack, budget and algorithm combination of the
robustness benchmark, for a strong and a weak adversary, plus a fast smoke grid.
"""
from typing import Any, Callable, Dict, List
import itertools

from src.experiment.config import ExperimentConfig, build_config
from src.lipschitz.constant import Experiment
from src.lipschitz.exception import PresetError
from src.utils.enums import AdversaryType, AttackKind, PolicyKind, RewardKind


PRESET_REWARDS = (RewardKind.TRIANGLE, RewardKind.SINE, RewardKind.TWO_DIM)
PRESET_ATTACKS = (AttackKind.ORACLE, AttackKind.GARCELON)
PRESET_ALGOS = (PolicyKind.ZOOMING, PolicyKind.RMEL, PolicyKind.BOB)

SMOKE_HORIZON: int = 2000
SMOKE_REPS: int = 3


def _grid(adversary: AdversaryType, overrides: Dict[str, Any], budget_scale: float = 1.0) -> List[ExperimentConfig]:
    configs = []
    for reward, attack, budget, algo in itertools.product(
            PRESET_REWARDS, PRESET_ATTACKS, Experiment.BUDGETS, PRESET_ALGOS
    ):
        horizon = Experiment.HORIZON_2D if reward is RewardKind.TWO_DIM else Experiment.HORIZON_1D
        values = dict(
            algo=algo,
            reward=reward,
            attack=attack,
            adversary=adversary,
            budget=budget * budget_scale,
            horizon=horizon,
            reps=Experiment.REPS,
            capped=True,
            bob_restart=False,
        )
        values.update(overrides)
        configs.append(build_config(values))
    return configs


def strong_grid(**overrides: Any) -> List[ExperimentConfig]:
    return _grid(AdversaryType.STRONG, overrides)


def weak_grid(**overrides: Any) -> List[ExperimentConfig]:
    return _grid(AdversaryType.WEAK, overrides)


def smoke(**overrides: Any) -> List[ExperimentConfig]:
    """ Strong grid at T=2000 with budgets scaled down to the same fraction of the horizon """
    values = dict(horizon=SMOKE_HORIZON, reps=SMOKE_REPS)
    values.update(overrides)
    budget_scale = int(values["horizon"]) / Experiment.HORIZON_1D
    return _grid(AdversaryType.STRONG, values, budget_scale=budget_scale)


PRESET_MAPPER: Dict[str, Callable[..., List[ExperimentConfig]]] = {
    "paper-strong": strong_grid,
    "paper-weak": weak_grid,
    "smoke": smoke,
}


def preset(name: str, **overrides: Any) -> List[ExperimentConfig]:
    """ Configs of a named grid. Overrides apply to every cell """
    factory = PRESET_MAPPER.get(name)
    if factory is None:
        raise PresetError(f"Invalid preset name {name}. Valid names are {list(PRESET_MAPPER.keys())}")
    return factory(**overrides)
