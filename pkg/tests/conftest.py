"""
File:           conftest.py
Author:         Dibyaranjan Sathua
Created on:     15/08/22, 9:02 am
"""
import numpy as np
import pytest

from src.experiment.config import build_config


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    """ Fast triangle run: coarse zooming grid, short horizon, one repetition """
    def factory(**overrides):
        values = dict(algo="zooming", reward="triangle", horizon=300, reps=1, grid_depth=6, stride=10)
        values.update(overrides)
        return build_config(values)
    return factory
