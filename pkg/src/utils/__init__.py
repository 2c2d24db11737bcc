"""
File:           __init__.py
Author:         Dibyaranjan Sathua
Created on:     15/04/22, 7:24 pm
"""
from typing import Sequence
import math


def dyadic_side(depth: int) -> float:
    """ Side length 2^-depth. Exact in binary floating point """
    return math.ldexp(1.0, -depth)


def lexicographic_rank(index: Sequence[int], base: int) -> int:
    """ Rank of an integer coordinate tuple in lexicographic order with `base` values per axis """
    rank = 0
    for value in index:
        rank = rank * base + value
    return rank
