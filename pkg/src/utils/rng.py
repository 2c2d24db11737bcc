"""
File:           rng.py
Author:         Dibyaranjan Sathua
Created on:     02/08/22, 9:12 pm

Seed handling for simulation runs. One root seed per run is split into independent
numpy generators so that adding randomness to one component never shifts the draws
of another.
"""
from dataclasses import dataclass

import numpy as np


STREAM_NAMES = ("noise", "adversary", "policy", "sampling")


@dataclass(frozen=True)
class RandomStreams:
    noise: np.random.Generator
    adversary: np.random.Generator
    policy: np.random.Generator
    sampling: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        """ Spawn one child generator per stream from the root seed """
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        generators = [np.random.default_rng(child) for child in children]
        return cls(*generators)

