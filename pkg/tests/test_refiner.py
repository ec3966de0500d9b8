"""
Tests for pullbacks, joins over progressions and interval-set arithmetic.
"""

import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from pentropy_lab.components import iet_engine, refiner
from pentropy_lab.models.partition import IntervalPartition
from pentropy_lab.models.systems import MeasurableSet
from pentropy_lab.utils.error_handling import SizeCapError


def grid_join_entropy(T, xi, j, L, grid):
    """
    Join entropy from label tuples of grid-cell midpoints, valid when every
    breakpoint of the join is a multiple of 1/grid.
    """
    R = iet_engine.power(T, j)
    weights = defaultdict(Fraction)
    for k in range(grid):
        x = Fraction(2 * k + 1, 2 * grid)
        labels = []
        for _ in range(L):
            x = iet_engine.apply(R, x)
            labels.append(int(xi.cell_index_many(np.array([x], dtype=object), True)[0]))
        weights[tuple(labels)] += Fraction(1, grid)
    return -sum(float(w) * math.log(float(w)) for w in weights.values())


class TestPullback:
    """Test T^{-1} xi."""

    def test_rotation_pullback(self, rational_rotation, halves):
        pulled = refiner.pullback(rational_rotation, halves)
        assert pulled.breakpoints == (Fraction(0), Fraction(1, 10), Fraction(3, 5))

    def test_pullback_of_trivial_partition(self, three_iet):
        pulled = refiner.pullback(three_iet, IntervalPartition.trivial())
        assert pulled.breakpoints == (Fraction(0), Fraction(1, 2), Fraction(5, 6))


class TestJoinOverProgression:
    """Test the exact join decomposition."""

    def test_identity_join_is_xi(self, halves):
        decomposition = refiner.join_over_progression(iet_engine.identity(), halves, 3, 5)
        assert sorted(decomposition.group_measures) == [0.5, 0.5]
        assert decomposition.factor_count == 5

    @pytest.mark.parametrize("j,L", [(1, 1), (1, 4), (2, 3), (3, 6)])
    def test_rotation_matches_grid_oracle(self, rational_rotation, halves, j, L):
        decomposition = refiner.join_over_progression(rational_rotation, halves, j, L)
        H = refiner.shannon_from_measures(decomposition.group_measures)
        assert H == pytest.approx(grid_join_entropy(rational_rotation, halves, j, L, 100), abs=1e-12)

    @pytest.mark.parametrize("j,L", [(1, 3), (2, 4), (5, 2)])
    def test_three_iet_matches_grid_oracle(self, three_iet, j, L):
        xi = IntervalPartition.dyadic(2)
        decomposition = refiner.join_over_progression(three_iet, xi, j, L)
        H = refiner.shannon_from_measures(decomposition.group_measures)
        assert H == pytest.approx(grid_join_entropy(three_iet, xi, j, L, 120), abs=1e-12)

    def test_group_measures_sum_to_one(self, golden_rotation, halves):
        decomposition = refiner.join_over_progression(golden_rotation, halves, 2, 10)
        assert decomposition.group_measures.sum() == pytest.approx(1.0, abs=1e-12)
        # elementary count bound L (c + d - 2) + 1
        assert decomposition.elementary_count <= 10 * 2 + 1

    def test_size_cap(self, golden_rotation, halves):
        with pytest.raises(SizeCapError) as excinfo:
            refiner.join_over_progression(golden_rotation, halves, 1, 50, size_cap=10)
        assert excinfo.value.exit_code == 3

    def test_invalid_progression(self, golden_rotation, halves):
        with pytest.raises(ValueError):
            refiner.join_over_progression(golden_rotation, halves, 0, 3)


class TestJoinEntropyPrefixes:
    """Test the one-pass prefix entropies."""

    def test_prefixes_match_individual_joins(self, three_iet, halves):
        prefixes = refiner.join_entropy_prefixes(three_iet, halves, 2, 6)
        for L in range(1, 7):
            decomposition = refiner.join_over_progression(three_iet, halves, 2, L)
            assert prefixes[L - 1] == pytest.approx(
                refiner.shannon_from_measures(decomposition.group_measures), abs=1e-12
            )

    def test_prefixes_nondecreasing(self, golden_rotation, halves):
        prefixes = refiner.join_entropy_prefixes(golden_rotation, halves, 3, 20)
        assert np.all(np.diff(prefixes) >= -1e-12)


class TestLabelConstancy:
    """Test the sampled label re-check."""

    def test_valid_decomposition_passes(self, golden_rotation, halves, rng):
        decomposition = refiner.join_over_progression(
            golden_rotation, halves, 1, 8, verify=False
        )
        R = iet_engine.power(golden_rotation, 1)
        assert refiner.verify_label_constancy(decomposition, R, halves, rng, fraction=1.0) == []

    def test_tampered_labels_detected(self, rational_rotation, halves, rng):
        decomposition = refiner.join_over_progression(
            rational_rotation, halves, 1, 4, verify=False
        )
        decomposition.labels[0, 0] += 1
        failures = refiner.verify_label_constancy(
            decomposition, rational_rotation, halves, rng, fraction=1.0
        )
        assert failures == [0]


class TestSetArithmetic:
    """Test interval-set operations."""

    def test_intersection(self):
        A = MeasurableSet.from_intervals([(Fraction(0), Fraction(1, 2)), (Fraction(3, 4), Fraction(1))])
        B = MeasurableSet.interval(Fraction(1, 4), Fraction(7, 8))
        assert refiner.set_intersection(A, B).intervals == (
            (Fraction(1, 4), Fraction(1, 2)),
            (Fraction(3, 4), Fraction(7, 8)),
        )

    def test_disjoint_intersection_is_empty(self):
        A = MeasurableSet.interval(Fraction(0), Fraction(1, 3))
        B = MeasurableSet.interval(Fraction(1, 3), Fraction(1))
        assert refiner.set_intersection(A, B).measure == 0

    def test_union_merges(self):
        A = MeasurableSet.interval(Fraction(0), Fraction(1, 3))
        B = MeasurableSet.interval(Fraction(1, 3), Fraction(1, 2))
        assert refiner.set_union(A, B) == MeasurableSet.interval(Fraction(0), Fraction(1, 2))

    def test_mixed_modes(self, left_half):
        B = MeasurableSet.interval(0.25, 0.75)
        assert float(refiner.set_intersection(left_half, B).measure) == pytest.approx(0.25)

    def test_image(self, rational_rotation, left_half):
        assert refiner.set_image(rational_rotation, left_half) == MeasurableSet.interval(
            Fraction(2, 5), Fraction(9, 10)
        )

    def test_preimage_wraps(self, rational_rotation, left_half):
        assert refiner.set_preimage(rational_rotation, left_half).intervals == (
            (Fraction(0), Fraction(1, 10)),
            (Fraction(3, 5), Fraction(1)),
        )

    def test_image_preserves_measure(self, three_iet):
        A = MeasurableSet.interval(Fraction(1, 7), Fraction(6, 7))
        for m in (1, 2, 5, -3):
            assert refiner.set_image(three_iet, A, m).measure == A.measure

    def test_image_matches_pointwise(self, three_iet):
        A = MeasurableSet.interval(Fraction(1, 3), Fraction(11, 12))
        image = refiner.set_image(three_iet, A, 2)
        for k in range(48):
            x = Fraction(2 * k + 1, 96)
            y = iet_engine.apply(three_iet, iet_engine.apply(three_iet, x))
            assert image.contains(y) == A.contains(x)

    def test_contains_many(self, left_half):
        points = np.array([0.0, 0.49, 0.5, 0.99])
        assert list(refiner.contains_many(left_half.in_mode(False), points)) == [
            True,
            True,
            False,
            False,
        ]


class TestExtendedMeasurePreservation:
    """Test preimages under exchanges with irrational lengths."""

    @pytest.mark.parametrize("m", [1, 5, 89, -34])
    def test_preimage_measure(self, m):
        T = iet_engine.power(iet_engine.random_iet(4, np.random.default_rng(7)), m)
        for pieces in ([(0.1, 0.45)], [(0.0, 0.2), (0.6, 0.95)], [(0.33, 0.34)]):
            A = MeasurableSet.from_intervals(pieces)
            assert abs(float(refiner.set_preimage(T, A).measure) - float(A.measure)) <= 1e-10

    def test_golden_rotation_preimage(self, golden_rotation, left_half):
        for m in (1, 13, 144):
            T_m = iet_engine.power(golden_rotation, m)
            assert float(refiner.set_preimage(T_m, left_half).measure) == pytest.approx(
                0.5, abs=1e-10
            )
