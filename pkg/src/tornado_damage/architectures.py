"""Hidden-layer layout generators: descending, wide, and deep families."""

from __future__ import annotations

import math

MIN_WIDTH = 4


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def descending_chain(n_inputs: int) -> list[int]:
    """Two-thirds descending widths, rounded to nearest (half away from
    zero), floored at 4; the chain ends at the first 4-wide layer."""
    if n_inputs < 1:
        raise ValueError(f"n_inputs must be >= 1, got {n_inputs}")
    width = max(_round_half_away(n_inputs * 2.0 / 3.0), MIN_WIDTH)
    chain = [width]
    while chain[-1] != MIN_WIDTH:
        width = max(_round_half_away(chain[-1] * 2.0 / 3.0), MIN_WIDTH)
        chain.append(width)
    return chain


def descending_architectures(n_inputs: int) -> list[list[int]]:
    """Every prefix of the descending chain as its own architecture."""
    chain = descending_chain(n_inputs)
    return [chain[: i + 1] for i in range(len(chain))]


def wide_architectures(widths: list[int]) -> list[list[int]]:
    """Two hidden layers of w units each, one architecture per width."""
    if not widths:
        raise ValueError("widths must be nonempty")
    return [[w, w] for w in widths]


def deep_architectures(n_inputs: int, depths: list[int]) -> list[list[int]]:
    """floor(n_inputs/2) units per hidden layer, one architecture per depth."""
    if not depths:
        raise ValueError("depths must be nonempty")
    width = n_inputs // 2
    return [[width] * d for d in depths]
