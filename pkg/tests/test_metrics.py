import math

import numpy as np
import pytest

from keepersim.models.metrics import (
    brier,
    calibration_bins,
    logloss,
    threshold_accuracy,
)


class TestLogloss:
    def test_uniform_three_class(self):
        preds = np.full((5, 3), 1 / 3)
        assert logloss(preds, np.array([0, 1, 2, 0, 1])) == pytest.approx(math.log(3))

    def test_perfect_predictions_hit_clip_floor(self):
        preds = np.eye(3)
        assert logloss(preds, np.array([0, 1, 2])) == pytest.approx(0.0, abs=1e-12)

    def test_base_rate_fixture_matches_hand_computation(self):
        # 10 labels: 4 natural, 2 center, 4 nonnatural; base predictor uses
        # the empirical frequencies -> -(0.8 ln 0.4 + 0.2 ln 0.2)
        labels = np.array([0, 0, 0, 0, 1, 1, 2, 2, 2, 2])
        preds = np.tile([0.4, 0.2, 0.4], (10, 1))
        expected = -(8 * math.log(0.4) + 2 * math.log(0.2)) / 10
        assert logloss(preds, labels) == pytest.approx(expected)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            logloss(np.full((3, 3), 1 / 3), np.array([0, 1]))


class TestBrier:
    def test_perfect(self):
        assert brier(np.array([1.0, 0.0, 1.0]), np.array([1, 0, 1])) == 0.0

    def test_half_everywhere(self):
        assert brier(np.full(8, 0.5), np.ones(8)) == pytest.approx(0.25)

    def test_four_row_fixture(self):
        p = np.array([0.9, 0.2, 0.5, 0.7])
        y = np.array([1, 0, 1, 0])
        expected = (0.1**2 + 0.2**2 + 0.5**2 + 0.7**2) / 4
        assert brier(p, y) == pytest.approx(expected)  # 0.1975

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            brier(np.array([0.5]), np.array([1, 0]))

    def test_probability_bounds(self):
        with pytest.raises(ValueError):
            brier(np.array([1.2]), np.array([1]))


class TestCalibrationBins:
    def test_bin_count_and_coverage(self):
        bins = calibration_bins(np.linspace(0, 1, 50), np.zeros(50), n_bins=10)
        assert len(bins) == 10
        assert bins[0].lo == 0.0 and bins[-1].hi == 1.0

    def test_all_ones_top_bin(self):
        bins = calibration_bins(np.ones(20), np.ones(20), n_bins=10)
        assert bins[-1].count == 20
        assert bins[-1].observed_frequency == 1.0

    def test_empty_bins_flagged(self):
        bins = calibration_bins(np.full(5, 0.95), np.ones(5), n_bins=10)
        assert bins[0].count == 0
        assert math.isnan(bins[0].observed_frequency)

    def test_bernoulli_sampling_oracle(self):
        # predictions drawn uniformly, outcomes sampled from them: every
        # well-populated bin must track its mean prediction
        rng = np.random.default_rng(42)
        p = rng.uniform(0, 1, 5000)
        y = (rng.uniform(0, 1, 5000) < p).astype(float)
        for b in calibration_bins(p, y, n_bins=10):
            if b.count >= 200:
                assert abs(b.observed_frequency - b.mean_predicted) <= 0.05

    def test_needs_two_bins(self):
        with pytest.raises(ValueError):
            calibration_bins(np.array([0.5]), np.array([1]), n_bins=1)


class TestThresholdAccuracy:
    def test_perfect_predictions(self):
        d = np.array([1.0, 2.0, 3.0, 4.0])
        for t in (1.5, 2.5, 3.5):
            assert threshold_accuracy(d, d, t).accuracy == 1.0

    def test_threshold_below_everything(self):
        pred = np.array([2.5, 2.9, 3.1])
        actual = np.array([2.6, 3.0, 2.8])
        res = threshold_accuracy(pred, actual, 0.5)
        assert res.accuracy == 1.0
        assert res.mean_baseline == 1.0
        assert res.random_baseline == 1.0

    def test_six_row_fixture_hand_computed(self):
        pred = np.array([2.5, 2.9, 2.6, 3.0, 2.8, 2.4])
        actual = np.array([2.6, 3.1, 2.8, 2.9, 2.5, 2.3])
        res = threshold_accuracy(pred, actual, 2.7)
        # sides: pred near=[T,F,T,F,F,T], actual near=[T,F,F,F,T,T] -> 4/6
        assert res.accuracy == pytest.approx(4 / 6)
        # train mean = 2.7 -> "near" for all -> matches actual near 3/6
        assert res.mean_baseline == pytest.approx(0.5)
        # q = 0.5 -> q^2 + (1-q)^2 = 0.5
        assert res.random_baseline == pytest.approx(0.5)

    def test_threshold_positive(self):
        with pytest.raises(ValueError):
            threshold_accuracy(np.array([1.0]), np.array([1.0]), 0.0)
