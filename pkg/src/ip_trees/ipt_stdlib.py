"""
Minimal pure helpers: weighted_index, splitmix64, derive_seeds.
"""

from __future__ import annotations

from bisect import bisect_right
from itertools import accumulate
from typing import List, Sequence

MASK64 = (1 << 64) - 1


def weighted_index(weights: Sequence[float], u: float) -> int:
    """Index selected by a uniform draw ``u`` in ``[0, 1)`` with probability ∝ weight."""

    if not weights:
        raise ValueError("weighted_index needs at least one weight")
    cumulative = list(accumulate(max(weight, 0.0) for weight in weights))
    total = cumulative[-1]
    if total <= 0:
        raise ValueError("weighted_index needs a positive total weight")
    position = bisect_right(cumulative, u * total)
    return min(position, len(weights) - 1)


def splitmix64(x: int) -> int:
    """Deterministic 64-bit mixer (splitmix64)."""

    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_seeds(seed: int, count: int) -> List[int]:
    """Per-task seeds for batch runs: the splitmix64 stream started at ``seed``."""

    seeds: List[int] = []
    state = seed & MASK64
    for _ in range(count):
        seeds.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) & MASK64
    return seeds
