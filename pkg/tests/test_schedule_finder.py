"""
Tests for the zero-entropy schedule finder.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from pentropy_lab.components import entropy_calculator as ec
from pentropy_lab.components import iet_engine
from pentropy_lab.components.schedule_finder import schedule_finder, verify_schedule
from pentropy_lab.models.entropy import ProgressionSchedule
from pentropy_lab.models.partition import CylinderPartition, IntervalPartition
from pentropy_lab.models.systems import IntervalExchange
from pentropy_lab.utils.error_handling import ScheduleExhaustedError, ValidationError


@pytest.fixture
def xi_list():
    return [IntervalPartition.dyadic(depth) for depth in (1, 2, 3)]


class TestScheduleFinder:
    """Test schedules over zero-entropy families."""

    def test_family_schedule_verifies(self, golden_rotation, rational_rotation, three_iet, xi_list):
        family = [golden_rotation, rational_rotation, three_iet]
        schedule = schedule_finder(family, xi_list, range(1, 13), L_cap=4096)
        assert sorted(schedule.table) == list(range(1, 13))
        assert schedule.table[1] == 1
        assert verify_schedule(family, xi_list, schedule) == []

    @pytest.mark.parametrize("j", range(2, 9))
    def test_lengths_are_minimal(self, golden_rotation, xi_list, j):
        schedule = schedule_finder([golden_rotation], xi_list, [j], L_cap=4096)
        L = schedule.length(j)
        partitions = xi_list[: j - 1]
        assert all(ec.h_j(golden_rotation, xi, j, L) < 1 / j for xi in partitions)
        if L > 1:
            assert any(ec.h_j(golden_rotation, xi, j, L - 1) >= 1 / j for xi in partitions)

    @pytest.mark.slow
    def test_eight_member_family_to_fifty(self, xi_list):
        family = [
            iet_engine.rotation("golden"),
            iet_engine.rotation("2/5"),
            iet_engine.rotation("1/3"),
            iet_engine.rotation("3/7"),
            iet_engine.rotation(0.41421356237309503),
            IntervalExchange((Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)), (3, 2, 1)),
            IntervalExchange((Fraction(1, 5), Fraction(1, 2), Fraction(3, 10)), (3, 2, 1)),
            iet_engine.random_iet(3, np.random.default_rng(3)),
        ]
        schedule = schedule_finder(family, xi_list, range(1, 51), L_cap=4096)
        assert sorted(schedule.table) == list(range(1, 51))
        assert verify_schedule(family, xi_list, schedule) == []

    def test_periodic_member_needs_short_progressions(self, rational_rotation, xi_list):
        schedule = schedule_finder([rational_rotation], xi_list, range(1, 6), L_cap=4096)
        assert all(L >= 1 for L in schedule.table.values())
        assert verify_schedule([rational_rotation], xi_list, schedule) == []


class TestIdentityFamily:
    """Test the closed form H(xi) / L < 1 / j for the identity."""

    def test_lengths_follow_closed_form(self, halves):
        schedule = schedule_finder([iet_engine.identity()], [halves], range(2, 30), L_cap=4096)
        for j in range(2, 30):
            assert schedule.length(j) == math.floor(j * math.log(2)) + 1


class TestWitnesses:
    """Test positive-entropy witnesses and cap exhaustion."""

    def test_bernoulli_member_is_witness(self, golden_rotation, fair_coin, halves):
        with pytest.raises(ScheduleExhaustedError) as excinfo:
            schedule_finder([golden_rotation, fair_coin], [halves], [1, 2, 3], L_cap=64)
        assert excinfo.value.witness_index == 1
        assert excinfo.value.j == 2
        assert excinfo.value.exit_code == 3
        assert excinfo.value.to_report()["error"]["context"]["witness_index"] == 1

    def test_small_cap_exhausts(self, golden_rotation, halves):
        with pytest.raises(ScheduleExhaustedError) as excinfo:
            schedule_finder([golden_rotation], [halves], [12], L_cap=2)
        assert excinfo.value.witness_index == 0


class TestValidation:
    """Test input checks."""

    def test_problems_are_aggregated(self):
        with pytest.raises(ValidationError) as excinfo:
            schedule_finder([], [], [1], L_cap=4)
        assert len(excinfo.value.errors) == 2

    def test_cylinder_partition_rejected(self, golden_rotation):
        with pytest.raises(ValidationError, match="interval partition"):
            schedule_finder([golden_rotation], [CylinderPartition(1)], [1], L_cap=4)

    def test_empty_j_range(self, golden_rotation, halves):
        with pytest.raises(ValidationError, match="j_range"):
            schedule_finder([golden_rotation], [halves], [], L_cap=4)

    def test_nonpositive_cap(self, golden_rotation, halves):
        with pytest.raises(ValidationError, match="L_cap"):
            schedule_finder([golden_rotation], [halves], [1], L_cap=0)


class TestVerifySchedule:
    """Test the independent re-check."""

    def test_reports_violations(self, golden_rotation, halves):
        schedule = ProgressionSchedule.tabulated({2: 1})
        assert verify_schedule([golden_rotation], [halves], schedule) == [(2, 0, 1)]
