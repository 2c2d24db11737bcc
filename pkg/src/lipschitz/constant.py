"""
File:           constant.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 1:19 pm
"""


class Covering:
    REGION_CAP: int = 2 ** 20


class ZoomingDefaults:
    GRID_DEPTH_1D: int = 12
    GRID_DEPTH_2D: int = 7
    GRID_DEPTH_HIGH_DIM: int = 4
    CAPPED: bool = True


class OracleAttack:
    BENIGN_RADIUS: float = 0.2
    MARGIN: float = 0.1
    FIRE_PROBABILITY: float = 0.5


class GarcelonAttack:
    NOISE_SIGMA: float = 0.1
    CLIP_SIGMAS: float = 3.0
    FIRE_PROBABILITY: float = 0.5
    # Closed boxes [lo, hi] per axis, keyed by dimension
    TARGET_1D = ((0.5,), (1.0,))
    TARGET_2D = ((0.0, 0.0), (0.5, 0.5))


class Corruption:
    PER_ROUND_CAP: float = 1.0


class OptimumSearch:
    RESOLUTION_1D: float = 1e-4
    RESOLUTION_2D: float = 1e-3
    RESOLUTION_HIGH_DIM: float = 2e-2


class BoBDefaults:
    EXPONENT_CLAMP: float = 50.0
    RESTART_EACH_BATCH: bool = True


class RMELDefaults:
    B: float = 2.0
    # Noise-scaled components: quota ceil(QUOTA_SCALE sigma^2 ln(4T/delta) 4^m),
    # threshold BIAS / 2^m + CONFIDENCE sigma / sqrt(n)
    QUOTA_SCALE: float = 0.6
    BIAS: float = 1.0
    CONFIDENCE: float = 1.6


class Experiment:
    HORIZON_1D: int = 50000
    HORIZON_2D: int = 60000
    DELTA: float = 0.01
    SIGMA: float = 0.1
    REPS: int = 20
    TRACE_STRIDE: int = 50
    BUDGETS = (0, 3000, 4500)
