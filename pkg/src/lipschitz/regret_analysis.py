"""
File:           regret_analysis.py
Author:         Dibyaranjan Sathua
Created on:     20/04/22, 9:36 pm
"""
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field
import math

import numpy as np
import pandas as pd


def trace_points(horizon: int, stride: int) -> np.ndarray:
    """ Rounds min(k * stride, T) for k = 1..ceil(T / stride) """
    count = int(math.ceil(horizon / stride))
    return np.minimum(np.arange(1, count + 1) * stride, horizon)


@dataclass()
class RegretTrace:
    """ Regret of one run, computed from the true expected reward """
    seed: int
    horizon: int
    mu_star: float
    instantaneous: np.ndarray = None
    budget_spent: np.ndarray = None
    rounds: Optional[List[Dict[str, Any]]] = None
    _t: int = 0

    def __post_init__(self):
        if self.instantaneous is None:
            self.instantaneous = np.zeros(self.horizon, dtype=float)
        if self.budget_spent is None:
            self.budget_spent = np.zeros(self.horizon, dtype=float)

    def record(self, mu: float, spent: float, info: Optional[Dict[str, Any]] = None) -> None:
        """ Store round t's regret mu* - mu(x_t) and the budget spent after the round """
        self.instantaneous[self._t] = self.mu_star - mu
        self.budget_spent[self._t] = spent
        if self.rounds is not None and info is not None:
            self.rounds.append({"t": self._t + 1, **info})
        self._t += 1

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.instantaneous)

    @property
    def final_regret(self) -> float:
        return float(self.instantaneous.sum())

    @property
    def total_spent(self) -> float:
        return float(self.budget_spent[-1]) if self.horizon else 0.0

    def thinned(self, stride: int) -> pd.DataFrame:
        """ t, cum_regret, budget_spent at the stride points """
        points = trace_points(self.horizon, stride)
        return pd.DataFrame({
            "t": points,
            "cum_regret": self.cumulative[points - 1],
            "budget_spent": self.budget_spent[points - 1],
        })


@dataclass()
class AggregateResult:
    """ Final-regret statistics over repetitions and the mean thinned curve """
    traces: List[RegretTrace] = field(default_factory=list)
    stride: int = 50

    @property
    def reps(self) -> int:
        return len(self.traces)

    @property
    def final_regrets(self) -> np.ndarray:
        return np.array([trace.final_regret for trace in self.traces], dtype=float)

    @property
    def mean_final_regret(self) -> float:
        return float(self.final_regrets.mean()) if self.traces else 0.0

    @property
    def std_final_regret(self) -> float:
        # Population std so a single repetition reports 0
        return float(self.final_regrets.std(ddof=0)) if self.traces else 0.0

    @property
    def seeds(self) -> List[int]:
        return [trace.seed for trace in self.traces]

    def trace_frame(self) -> pd.DataFrame:
        """ Long table rep, t, cum_regret, budget_spent; reps numbered from 0 in seed order """
        frames = []
        for rep, trace in enumerate(self.traces):
            frame = trace.thinned(self.stride)
            frame.insert(0, "rep", rep)
            frames.append(frame)
        if not frames:
            return pd.DataFrame(columns=["rep", "t", "cum_regret", "budget_spent"])
        return pd.concat(frames, ignore_index=True)

    def mean_curve(self) -> pd.DataFrame:
        frame = self.trace_frame()
        return frame.groupby("t", as_index=False)["cum_regret"].mean()
