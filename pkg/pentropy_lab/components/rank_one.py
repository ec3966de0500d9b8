"""
Cutting-and-stacking towers of rank-one constructions.

Geometry is exact (Fractions). The base width is chosen so that the tower
after the last recipe stage fills [0, 1); the tower at an earlier stage n
occupies part of [0, 1) and the rest is residual mass that later stages
absorb as spacers, taken left to right from the unused part of [0, 1).
"""

import bisect
from fractions import Fraction
from math import prod
from typing import List, Tuple

import numpy as np

from ..models.systems import MeasurableSet, RankOneRecipe, Tower
from ..utils.arithmetic import EXTENDED, to_extended
from ..utils.error_handling import ValidationError
from ..utils.logging import get_logger

logger = get_logger("systems.rank_one")


def _check_recipe(recipe: RankOneRecipe) -> None:
    try:
        recipe.validate()
    except ValueError as e:
        raise ValidationError([str(e)]) from e


def build_tower(recipe: RankOneRecipe, n: int) -> Tower:
    """
    Stage-n tower; stage 1 is the single base level and stage
    ``len(recipe.stages) + 1`` is the final tower filling [0, 1).
    """
    _check_recipe(recipe)
    final = recipe.final_stage
    if not 1 <= n <= final:
        raise ValidationError([f"Stage must lie in 1..{final}, got {n}"])

    final_height = recipe.heights(final)[-1]
    width = Fraction(prod(stage.cuts for stage in recipe.stages), final_height)
    levels: List[Tuple[Fraction, Fraction]] = [(Fraction(0), width)]
    free = width

    for stage in recipe.stages[: n - 1]:
        piece = width / stage.cuts
        stacked: List[Tuple[Fraction, Fraction]] = []
        for column, spacers in enumerate(stage.spacers):
            for a, _ in levels:
                start = a + column * piece
                stacked.append((start, start + piece))
            for _ in range(spacers):
                stacked.append((free, free + piece))
                free += piece
        levels = stacked
        width = piece

    height = len(levels)
    tower = Tower(
        stage=n,
        height=height,
        level_width=width,
        levels=tuple(levels),
        residual_mass=1 - height * width,
        recipe=recipe,
    )
    tower.validate()
    logger.debug(
        "Built tower",
        extra={"stage": n, "height": height, "residual_mass": float(tower.residual_mass)},
    )
    return tower


def final_tower(recipe: RankOneRecipe) -> Tower:
    """The tower after every recipe stage; its partial map is the system."""
    return build_tower(recipe, recipe.final_stage)


def level_set(tower: Tower, levels) -> MeasurableSet:
    """Union of the given level indices of a tower."""
    return MeasurableSet.from_intervals(tower.levels[i] for i in levels)


def lower_half(tower: Tower) -> MeasurableSet:
    """The bottom half of the levels (at least one)."""
    return level_set(tower, range(max(1, tower.height // 2)))


def push_forward(tower: Tower, A: MeasurableSet, m: int) -> MeasurableSet:
    """
    Image of A under the m-th power of the partial tower map.

    Points whose orbit leaves the tower (above the top or, for m < 0, below
    the bottom) are dropped, so the result has measure at most mu(A).
    """
    if not A.exact:
        raise ValidationError(["Rank-one towers need exact (rational) sets"])
    starts, order = tower.sorted_levels
    width = tower.level_width
    start_list = list(starts)
    pieces: List[Tuple[Fraction, Fraction]] = []
    for a, b in A.intervals:
        k = max(bisect.bisect_right(start_list, a) - 1, 0)
        while k < len(start_list) and start_list[k] < b:
            lo = max(a, start_list[k])
            hi = min(b, start_list[k] + width)
            if lo < hi:
                level = int(order[k])
                target = level + m
                if 0 <= target < tower.height:
                    shift = tower.levels[target][0] - start_list[k]
                    pieces.append((lo + shift, hi + shift))
            k += 1
    return MeasurableSet.from_intervals(pieces)


def apply_many(tower: Tower, points: np.ndarray, m: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized m-th power of the partial map on extended-precision points.

    Returns the images and a mask of points where the power is defined.
    """
    starts, order = tower.sorted_levels
    starts = np.array([to_extended(s) for s in starts], dtype=EXTENDED)
    width = to_extended(tower.level_width)
    level_starts = np.array(
        [to_extended(a) for a, _ in tower.levels], dtype=EXTENDED
    )

    points = np.asarray(points, dtype=EXTENDED)
    k = np.searchsorted(starts, points, side="right") - 1
    k_safe = np.clip(k, 0, len(starts) - 1)
    inside = (k >= 0) & (points < starts[k_safe] + width)
    level = order[k_safe].astype(np.int64)
    target = level + m
    defined = inside & (target >= 0) & (target < tower.height)
    target_safe = np.clip(target, 0, tower.height - 1)
    images = points - starts[k_safe] + level_starts[target_safe]
    return np.where(defined, images, points), defined
