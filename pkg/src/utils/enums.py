"""
File:           enums.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 10:42 am
"""
from enum import Enum, unique


@unique
class MetricKind(str, Enum):
    """ Distance on the arm space """
    L_INF = "linf"
    L2 = "l2"


@unique
class RewardKind(str, Enum):
    TRIANGLE = "triangle"
    SINE = "sine"
    TWO_DIM = "twodim"
    LOWER_BOUND = "lower-bound"
    CUSTOM = "custom"


@unique
class AttackKind(str, Enum):
    NONE = "none"
    ORACLE = "oracle"
    GARCELON = "garcelon"
    LOWER_BOUND = "lower-bound"


@unique
class AdversaryType(str, Enum):
    """ Weak adversary commits before the pull, strong adversary sees the pulled arm """
    WEAK = "weak"
    STRONG = "strong"


@unique
class PolicyKind(str, Enum):
    ZOOMING = "zooming"
    ROBUST_ZOOMING = "robust-zooming"
    RMEL = "rmel"
    RMEL_ALT = "rmel-alt"
    BOB = "bob"


@unique
class RMELVariant(str, Enum):
    EPOCH_ELIM = "epoch"
    ROUND_ELIM = "round"


@unique
class SampleMode(str, Enum):
    """ How an arm is drawn inside an active region """
    UNIFORM = "uniform"
    CENTER = "center"


@unique
class OptimumMethod(str, Enum):
    CLOSED_FORM = "closed-form"
    GRID_SEARCH = "grid-search"
