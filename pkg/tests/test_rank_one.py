"""
Tests for cutting-and-stacking towers.
"""

from fractions import Fraction

import numpy as np
import pytest

from pentropy_lab.components import rank_one
from pentropy_lab.components.refiner import set_intersection
from pentropy_lab.components.rigidity_scanner import tower_rigidity
from pentropy_lab.models.systems import MeasurableSet, RankOneRecipe, RankOneStage
from pentropy_lab.utils.error_handling import ValidationError


class TestBuildTower:
    """Test tower geometry."""

    def test_chacon_stage_heights(self, chacon_recipe):
        heights = [rank_one.build_tower(chacon_recipe, n).height for n in range(1, 6)]
        assert heights == [1, 4, 13, 40, 121]

    def test_small_chacon_geometry(self):
        recipe = RankOneRecipe.chacon(2)
        tower = rank_one.build_tower(recipe, 2)
        assert tower.level_width == Fraction(3, 13)
        assert tower.levels == (
            (Fraction(0), Fraction(3, 13)),
            (Fraction(3, 13), Fraction(6, 13)),
            (Fraction(9, 13), Fraction(12, 13)),
            (Fraction(6, 13), Fraction(9, 13)),
        )
        assert tower.residual_mass == Fraction(1, 13)

    def test_final_tower_fills_unit_interval(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        assert tower.mass == 1
        assert tower.residual_mass == 0
        union = MeasurableSet.from_intervals(tower.levels)
        assert union == MeasurableSet.full()

    def test_stage_out_of_range(self, chacon_recipe):
        with pytest.raises(ValidationError, match="Stage must lie"):
            rank_one.build_tower(chacon_recipe, chacon_recipe.final_stage + 1)

    def test_invalid_recipe(self):
        recipe = RankOneRecipe((RankOneStage(3, (0, 1)),))
        with pytest.raises(ValidationError):
            rank_one.build_tower(recipe, 1)

    def test_lower_half(self):
        tower = rank_one.build_tower(RankOneRecipe.chacon(2), 2)
        A = rank_one.lower_half(tower)
        assert A.intervals == ((Fraction(0), Fraction(6, 13)),)


class TestPushForward:
    """Test the partial tower map."""

    def test_level_moves_up(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        base = rank_one.level_set(tower, [0])
        moved = rank_one.push_forward(tower, base, 5)
        assert moved == rank_one.level_set(tower, [5])

    def test_top_level_leaves(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        top = rank_one.level_set(tower, [tower.height - 1])
        assert rank_one.push_forward(tower, top, 1).measure == 0

    def test_negative_power_moves_down(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        moved = rank_one.push_forward(tower, rank_one.level_set(tower, [7]), -7)
        assert moved == rank_one.level_set(tower, [0])

    def test_measure_never_grows(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        A = MeasurableSet.interval(Fraction(1, 7), Fraction(5, 7))
        for m in (1, 13, 40, 200):
            assert rank_one.push_forward(tower, A, m).measure <= A.measure

    def test_extended_sets_rejected(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        A = MeasurableSet.interval(0.25, 0.5)
        with pytest.raises(ValidationError):
            rank_one.push_forward(tower, A, 1)

    def test_apply_many_agrees_with_push_forward(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        level = tower.levels[3]
        points = np.array([float(level[0] + (level[1] - level[0]) * t) for t in (0.2, 0.5, 0.8)])
        images, defined = rank_one.apply_many(tower, points, 4)
        assert defined.all()
        target = tower.levels[7]
        assert np.all(images >= float(target[0]) - 1e-15)
        assert np.all(images < float(target[1]) + 1e-15)


class TestTowerRigidity:
    """Test partial rigidity at the tower heights."""

    def test_chacon_rigidity_at_heights(self, chacon_recipe):
        row = tower_rigidity(chacon_recipe, [5])[0]
        assert row.height == 121
        assert row.ratio >= 0.6

    def test_lower_half_measure(self, chacon_recipe):
        row = tower_rigidity(chacon_recipe, [3])[0]
        tower = rank_one.build_tower(chacon_recipe, 3)
        assert row.measure == pytest.approx(float(6 * tower.level_width))

    def test_matches_direct_computation(self, chacon_recipe):
        tower = rank_one.build_tower(chacon_recipe, 4)
        final = rank_one.final_tower(chacon_recipe)
        A = rank_one.lower_half(tower)
        expected = set_intersection(rank_one.push_forward(final, A, tower.height), A).measure
        row = tower_rigidity(chacon_recipe, [4])[0]
        assert row.correlation == pytest.approx(float(expected), abs=1e-15)
