"""
File:           base_policy.py
Author:         Dibyaranjan Sathua
Created on:     15/04/22, 6:51 pm
"""
from typing import Any, Dict, Optional
from abc import ABC, abstractmethod

from src.lipschitz.metric_space import Arm
from src.utils.enums import PolicyKind


class BasePolicy(ABC):
    """ Abstract bandit policy. The harness calls select_arm then update once per round """
    POLICY_KIND: PolicyKind = PolicyKind.ZOOMING

    def __init__(self, horizon: int, delta: float, dim: int, kind: Optional[PolicyKind] = None):
        if horizon < 1:
            raise ValueError(f"Horizon must be >= 1, got {horizon}")
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        self.horizon: int = horizon
        self.delta: float = delta
        self.dim: int = dim
        self.t: int = 0
        self.kind: PolicyKind = self.POLICY_KIND if kind is None else kind

    @abstractmethod
    def select_arm(self) -> Arm:
        pass

    @abstractmethod
    def update(self, arm: Arm, observation: float) -> None:
        pass

    def round_info(self) -> Dict[str, Any]:
        """ Policy-specific fields for the per-round log """
        return {}

    def __repr__(self):
        return f"{self.__class__.__name__}[{self.kind.value}](T={self.horizon}, delta={self.delta}, d={self.dim})"
