"""
Tests for the partial-rigidity scanner and continued-fraction return times.
"""

from fractions import Fraction

import pytest

from pentropy_lab.components import rigidity_scanner as rs
from pentropy_lab.components.correlation_engine import default_cylinder_sets, default_test_sets
from pentropy_lab.utils.arithmetic import golden_mean
from pentropy_lab.utils.error_handling import ValidationError


@pytest.fixture
def dyadic_sets():
    return default_test_sets()


class TestGoldenRotation:
    """Test witnesses at Fibonacci return times."""

    @pytest.mark.parametrize(
        "j,expected",
        [(1, 2), (2, 3), (3, 5), (4, 5), (5, 8), (7, 8), (8, 13), (12, 13), (13, 21), (20, 21), (21, 34), (30, 34)],
    )
    def test_witness(self, golden_rotation, dyadic_sets, j, expected):
        report = rs.rigidity_scan(golden_rotation, dyadic_sets, 0.5, j, m_cap=100)
        assert report.N == expected
        assert report.witness_m == expected
        assert report.return_time
        assert len(report.correlations) == j

    def test_profile_shares_table(self, golden_rotation, dyadic_sets):
        reports = rs.rigidity_profile(golden_rotation, dyadic_sets, 0.5, [1, 8, 21], m_cap=100)
        assert [r.N for r in reports] == [2, 13, 34]

    def test_exhaustion(self, golden_rotation, dyadic_sets):
        report = rs.rigidity_scan(golden_rotation, dyadic_sets, 0.99, 1, m_cap=5)
        assert report.exhausted
        assert report.witness_m is None
        assert "no m in (1, 5]" in report.diagnostic
        assert report.as_dict()["N"] is None


class TestMonotonicity:
    """Test how N responds to j and m_cap."""

    def test_nondecreasing_in_j(self, golden_rotation, rational_rotation, dyadic_sets):
        for system in (golden_rotation, rational_rotation):
            reports = rs.rigidity_profile(system, dyadic_sets, 0.5, list(range(1, 31)), 100)
            N = [report.N for report in reports]
            assert None not in N
            assert N == sorted(N)

    @pytest.mark.parametrize("j", [1, 5, 12, 20])
    def test_stable_as_cap_grows(self, golden_rotation, dyadic_sets, j):
        N = [
            rs.rigidity_scan(golden_rotation, dyadic_sets, 0.5, j, cap).N
            for cap in (30, 100, 300)
        ]
        assert N[0] is not None
        assert N == [N[0]] * 3


class TestRationalRotation:
    """Test exact returns of a periodic rotation."""

    @pytest.mark.parametrize("j,expected", [(7, 10), (10, 15), (12, 15), (31, 35)])
    def test_first_period_multiple(self, rational_rotation, dyadic_sets, j, expected):
        report = rs.rigidity_scan(rational_rotation, dyadic_sets, 0.5, j, m_cap=60)
        assert report.N == expected
        measures = [float(B.measure) for B in dyadic_sets[:j]]
        assert report.correlations == pytest.approx(measures)


class TestBernoulli:
    """Test that a mixing shift is never rigid."""

    def test_exhausts(self, fair_coin):
        report = rs.rigidity_scan(fair_coin, default_cylinder_sets(), 0.5, 1, m_cap=20)
        assert report.exhausted
        assert report.return_time is None


class TestValidation:
    """Test input checks."""

    def test_problems_are_aggregated(self, golden_rotation, dyadic_sets):
        with pytest.raises(ValidationError) as excinfo:
            rs.rigidity_scan(golden_rotation, dyadic_sets[:2], 1.5, 5, m_cap=3)
        assert len(excinfo.value.errors) == 3

    def test_empty_j_values(self, golden_rotation, dyadic_sets):
        with pytest.raises(ValidationError):
            rs.rigidity_profile(golden_rotation, dyadic_sets, 0.5, [], m_cap=10)


class TestConvergents:
    """Test continued-fraction denominators."""

    def test_golden_mean_gives_fibonacci(self):
        assert rs.convergent_denominators(golden_mean(), 10) == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]

    def test_rational_stops_at_denominator(self):
        assert rs.convergent_denominators(Fraction(2, 5)) == [1, 2, 5]
        assert rs.convergent_denominators(Fraction(1, 2)) == [1, 2]

    def test_rotation_number(self, golden_rotation, rational_rotation, three_iet):
        assert rs.rotation_number(rational_rotation) == Fraction(2, 5)
        assert rs.rotation_number(three_iet) is None
        assert float(rs.rotation_number(golden_rotation)) == pytest.approx(float(golden_mean()))
