"""
File:           exception.py
Author:         Dibyaranjan Sathua
Created on:     16/04/22, 12:21 pm
"""


class LipschitzBanditError(Exception):
    pass


class DimensionMismatchError(LipschitzBanditError):
    pass


class RegionCapError(LipschitzBanditError):
    """ A covering or refinement would produce more regions than the configured cap """
    pass


class PolicyStateError(LipschitzBanditError):
    pass


class InvariantViolationError(LipschitzBanditError):
    pass


class ConfigFileError(LipschitzBanditError):
    pass


class PresetError(LipschitzBanditError):
    pass
