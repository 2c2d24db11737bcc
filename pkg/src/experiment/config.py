"""
File:           config.py
Author:         Dibyaranjan Sathua
Created on:     07/05/22, 7:10 pm

Experiment configuration model. Values come from defaults, then a config file, then
command-line flags; the model validates the merged result.
"""
from typing import Any, Dict, Mapping, Optional, Union
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Extra, ValidationError, root_validator, validator

from src.lipschitz.config_reader import ConfigReader
from src.lipschitz.constant import BoBDefaults, Covering, Experiment, RMELDefaults, ZoomingDefaults
from src.lipschitz.exception import ConfigFileError
from src.utils.enums import (
    AdversaryType, AttackKind, MetricKind, PolicyKind, RewardKind, RMELVariant, SampleMode
)
from src.utils.logger import LogFacade


logger: LogFacade = LogFacade.get_logger("config")

FIXED_DIMENSION = {RewardKind.TRIANGLE: 1, RewardKind.SINE: 1, RewardKind.TWO_DIM: 2}


class ExperimentConfig(BaseModel):
    """ One cell of an experiment grid: policy, environment, attack and run protocol """
    algo: PolicyKind = PolicyKind.ZOOMING
    reward: RewardKind = RewardKind.TRIANGLE
    attack: AttackKind = AttackKind.NONE
    adversary: AdversaryType = AdversaryType.STRONG
    budget: float = 0.0
    known_budget: Optional[float] = None
    dim: Optional[int] = None
    horizon: Optional[int] = None
    delta: float = Experiment.DELTA
    sigma: float = Experiment.SIGMA
    reps: int = Experiment.REPS
    seed: int = 0
    stride: int = Experiment.TRACE_STRIDE
    B: float = RMELDefaults.B
    rmel_variant: RMELVariant = RMELVariant.EPOCH_ELIM
    bob_restart: bool = BoBDefaults.RESTART_EACH_BATCH
    grid_depth: Optional[int] = None
    capped: bool = ZoomingDefaults.CAPPED
    metric: MetricKind = MetricKind.L_INF
    sample_mode: SampleMode = SampleMode.UNIFORM
    sigma_radius: bool = True
    lb_epsilon: Optional[float] = None
    lb_cell: int = 1
    region_cap: int = Covering.REGION_CAP
    workers: int = 1
    log_rounds: bool = False

    class Config:
        extra = Extra.forbid

    @validator("reward")
    def builtin_reward(cls, value: RewardKind) -> RewardKind:
        if value is RewardKind.CUSTOM:
            raise ValueError("custom rewards are only available through the Python API")
        return value

    @validator("dim", always=True)
    def resolve_dim(cls, value: Optional[int], values: Dict[str, Any]) -> Optional[int]:
        reward = values.get("reward")
        if reward in FIXED_DIMENSION:
            fixed = FIXED_DIMENSION[reward]
            if value is not None and value != fixed:
                raise ValueError(f"reward {reward.value} is {fixed}-dimensional, got dim={value}")
            return fixed
        if value is None:
            return 1
        if value < 1:
            raise ValueError(f"dim must be >= 1, got {value}")
        return value

    @validator("horizon", always=True)
    def resolve_horizon(cls, value: Optional[int], values: Dict[str, Any]) -> Optional[int]:
        if value is None:
            return Experiment.HORIZON_2D if values.get("dim") == 2 else Experiment.HORIZON_1D
        if value < 1:
            raise ValueError(f"horizon must be >= 1, got {value}")
        return value

    @validator("delta")
    def delta_in_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {value}")
        return value

    @validator("sigma", "budget")
    def non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"must be >= 0, got {value}")
        return value

    @validator("reps", "stride", "workers", "region_cap", "lb_cell")
    def positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be >= 1, got {value}")
        return value

    @validator("B")
    def base_above_one(cls, value: float) -> float:
        if value <= 1.0:
            raise ValueError(f"B must exceed 1, got {value}")
        return value

    @validator("lb_epsilon")
    def epsilon_range(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value <= 1.0:
            raise ValueError(f"lb_epsilon must lie in (0, 1], got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def check_combination(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        dim = values["dim"]
        if values["budget"] > values["horizon"]:
            raise ValueError(f"budget {values['budget']} exceeds the horizon {values['horizon']}")
        if values["attack"] is AttackKind.GARCELON and dim not in (1, 2):
            raise ValueError(f"garcelon attack has no target region for d={dim}")
        if values["metric"] is MetricKind.L2 and dim > 2:
            raise ValueError("the l2 metric is only supported for d <= 2")
        if values["attack"] is AttackKind.LOWER_BOUND and values["reward"] is not RewardKind.LOWER_BOUND:
            raise ValueError("the lower-bound attack needs the lower-bound reward")
        if values["algo"] is PolicyKind.BOB and values["horizon"] < 2:
            raise ValueError("bob needs a horizon of at least 2")
        if values["known_budget"] is not None and values["known_budget"] < 0:
            raise ValueError(f"known_budget must be >= 0, got {values['known_budget']}")
        return values

    @property
    def effective_known_budget(self) -> float:
        """ The C handed to Robust Zooming. Plain Zooming always runs with 0 """
        if self.algo is PolicyKind.ZOOMING:
            return 0.0
        return self.budget if self.known_budget is None else self.known_budget

    @property
    def effective_rmel_variant(self) -> RMELVariant:
        return RMELVariant.ROUND_ELIM if self.algo is PolicyKind.RMEL_ALT else self.rmel_variant

    @property
    def label(self) -> str:
        """ Directory-friendly name of the cell """
        return (
            f"{self.algo.value}_{self.reward.value}_{self.attack.value}_{self.adversary.value}"
            f"_C{_format_value(self.budget)}"
        )

    def flat_items(self) -> Dict[str, str]:
        """ Every resolved key as text, None values left out """
        return {
            key: _format_value(value) for key, value in self.dict().items() if value is not None
        }


def _format_value(value: Any) -> str:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return str(value)


def _validation_message(err: ValidationError) -> str:
    parts = []
    for error in err.errors():
        location = ".".join(str(item) for item in error["loc"])
        parts.append(f"{location}: {error['msg']}" if location != "__root__" else error["msg"])
    return "; ".join(parts)


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """ Validate a raw key/value mapping, hyphenated keys accepted """
    normalised = {str(key).replace("-", "_"): value for key, value in values.items()}
    try:
        return ExperimentConfig(**normalised)
    except ValidationError as err:
        raise ConfigFileError(f"Invalid experiment config: {_validation_message(err)}") from err


def parse_config(
        args: Optional[Mapping[str, Any]] = None,
        config_file: Optional[Union[str, Path]] = None
) -> ExperimentConfig:
    """ Flags override file values override defaults. Flags set to None are treated as absent """
    merged: Dict[str, Any] = dict()
    if config_file is not None:
        merged.update(ConfigReader(Path(config_file)).as_dict())
    for key, value in (args or {}).items():
        if value is not None:
            merged[key] = value
    config = build_config(merged)
    logger.info(f"Resolved config {config.label} (T={config.horizon}, reps={config.reps}, seed={config.seed})")
    return config


def dump_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    """ Write the resolved config as flat `key = value` text readable by parse_config """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{key} = {value}" for key, value in config.flat_items().items()]
    path.write_text("\n".join(lines) + "\n")
    return path
