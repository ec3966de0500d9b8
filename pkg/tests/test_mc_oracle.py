"""
Tests for the Monte Carlo oracles.
"""

import math

import pytest

from pentropy_lab.components import mc_oracle, rank_one
from pentropy_lab.components.bernoulli import shift_correlation
from pentropy_lab.components.correlation_engine import correlation
from pentropy_lab.models.partition import CylinderPartition
from pentropy_lab.models.sampling import SampleConfig
from pentropy_lab.models.systems import Cylinder
from pentropy_lab.utils.error_handling import ValidationError

AGREEMENT_K = 5


class TestEntropyCheck:
    """Test exact join entropies against sampled estimates."""

    def test_golden_rotation_agrees(self, golden_rotation, halves):
        row = mc_oracle.mc_entropy_check(
            golden_rotation, halves, 1, 4, SampleConfig(200_000, seed=17), k=AGREEMENT_K
        )
        assert row.passed
        assert row.stderr > 0

    def test_three_iet_agrees(self, three_iet, halves):
        row = mc_oracle.mc_entropy_check(
            three_iet, halves, 2, 4, SampleConfig(200_000, seed=5), k=AGREEMENT_K
        )
        assert row.passed

    def test_bernoulli_agrees(self, fair_coin):
        row = mc_oracle.mc_entropy_check(
            fair_coin, CylinderPartition(1), 2, 4, SampleConfig(200_000, seed=3), k=AGREEMENT_K
        )
        assert row.passed
        assert row.stderr > 0

    @pytest.mark.slow
    @pytest.mark.parametrize("j", range(1, 13))
    def test_fair_coin_within_three_sigma_at_million_samples(self, fair_coin, j):
        # 2^L stays well below N, so the plug-in histogram is not undersampled
        row = mc_oracle.mc_entropy_check(
            fair_coin, CylinderPartition(1), j, j, SampleConfig(10**6, seed=2024), k=3
        )
        assert row.exact == pytest.approx(j * math.log(2))
        assert row.passed

    def test_same_seed_same_row(self, golden_rotation, halves):
        config = SampleConfig(20_000, seed=8)
        first = mc_oracle.mc_entropy_check(golden_rotation, halves, 3, 4, config)
        second = mc_oracle.mc_entropy_check(golden_rotation, halves, 3, 4, config)
        assert first == second


class TestHistogram:
    """Test sampled label histograms."""

    def test_counts_total_samples(self, fair_coin):
        histogram = mc_oracle.mc_join_histogram(
            fair_coin, CylinderPartition(1), 1, 3, SampleConfig(1_000, seed=1)
        )
        assert int(histogram.counts.sum()) == 1_000
        assert len(histogram.as_dict()) <= 8
        assert sum(histogram.frequencies().values()) == pytest.approx(1.0)

    def test_invalid_progression(self, golden_rotation, halves):
        with pytest.raises(ValidationError):
            mc_oracle.mc_join_histogram(golden_rotation, halves, 0, 3, SampleConfig(10, seed=1))

    def test_bernoulli_needs_cylinders(self, fair_coin, halves):
        with pytest.raises(ValidationError, match="cylinder"):
            mc_oracle.mc_join_histogram(fair_coin, halves, 1, 3, SampleConfig(10, seed=1))


class TestCorrelationOracle:
    """Test binomial correlation estimates."""

    def test_rotation(self, rational_rotation, left_half):
        estimate, stderr = mc_oracle.mc_correlation(
            rational_rotation, left_half, left_half, 1, SampleConfig(100_000, seed=2)
        )
        assert abs(estimate - 0.1) <= AGREEMENT_K * stderr

    def test_bernoulli(self, biased_coin):
        A, B = Cylinder((0, 1)), Cylinder((1,))
        exact = shift_correlation(biased_coin, A, B, 1)
        estimate, stderr = mc_oracle.mc_correlation(
            biased_coin, A, B, 1, SampleConfig(100_000, seed=4)
        )
        assert abs(estimate - exact) <= AGREEMENT_K * stderr

    def test_tower(self, chacon_recipe):
        tower = rank_one.final_tower(chacon_recipe)
        A = rank_one.lower_half(rank_one.build_tower(chacon_recipe, 3))
        exact = correlation(tower, A, A, 13)
        estimate, stderr = mc_oracle.mc_correlation(tower, A, A, 13, SampleConfig(100_000, seed=6))
        assert abs(estimate - exact) <= AGREEMENT_K * stderr + 1e-9


class TestAgreement:
    """Test the k-sigma agreement rule."""

    def test_within_band(self):
        assert mc_oracle.agreement_test(1.0, 1.1, 0.05, k=3)
        assert not mc_oracle.agreement_test(1.0, 1.1, 0.05, k=1)

    def test_floor_covers_zero_stderr(self):
        assert mc_oracle.agreement_test(0.5, 0.5, 0.0)

    def test_negative_stderr(self):
        with pytest.raises(ValidationError):
            mc_oracle.agreement_test(1.0, 1.0, -0.1)
