import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditboost.errors import (
    InvalidBinCount,
    LengthMismatch,
    SingleClassDataset,
    UndefinedPrecision,
    UndefinedRecall,
)
from creditboost.metrics import (
    ConfusionMatrix,
    confusion,
    evaluate,
    fbeta,
    ks_statistic,
    log_loss,
    pr_curve,
    precision_recall,
    reliability_curve,
    roc_curve,
)

from oracles import auc_concordance, ks_brute, pr_auc_brute, reliability_groups


def random_instance(rng, n=40, tie_prone=False):
    labels = (rng.random(n) < 0.4).astype(int)
    labels[0], labels[1] = 0, 1
    if tie_prone:
        scores = rng.integers(0, 6, size=n) / 5.0
    else:
        scores = rng.random(n)
    return labels, scores


class TestLogLoss:
    def test_confident_correct_is_near_zero(self):
        assert log_loss([1], [1 - 1e-12]) < 1e-9

    def test_half_is_ln2(self):
        assert log_loss([1], [0.5]) == pytest.approx(math.log(2), abs=1e-12)

    def test_zero_prob_clamped(self):
        v = log_loss([1], [0.0])
        assert v == pytest.approx(-math.log(1e-15), abs=1e-9)
        assert math.isfinite(v)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            log_loss([1, 0], [0.5])


class TestConfusionFbeta:
    def test_fixed_point_p_equals_r(self):
        cm = ConfusionMatrix(tp=3, fp=3, tn=10, fn=3)  # P = R = 0.5
        for beta in (0.5, 1.0, 2.0):
            assert fbeta(cm, beta) == pytest.approx(0.5)

    def test_formula_plugin(self):
        # P = 0.5, R = 1 -> F1 = 2/3
        cm = ConfusionMatrix(tp=2, fp=2, tn=5, fn=0)
        assert fbeta(cm, 1.0) == pytest.approx(2 / 3)

    def test_no_predicted_positives(self):
        cm = confusion([1, 0], [0.1, 0.2], threshold=0.5)
        with pytest.raises(UndefinedPrecision):
            precision_recall(cm)

    def test_no_actual_positives(self):
        cm = confusion([0, 0], [0.9, 0.2], threshold=0.5)
        with pytest.raises(UndefinedRecall):
            precision_recall(cm)

    def test_counts_sum_to_n(self, rng):
        labels, scores = random_instance(rng)
        cm = confusion(labels, scores, threshold=0.35)
        assert cm.total == len(labels)

    def test_threshold_is_inclusive(self):
        cm = confusion([1, 0], [0.5, 0.49], threshold=0.5)
        assert (cm.tp, cm.tn) == (1, 1)


class TestRocCurve:
    def test_perfect_separation(self):
        assert roc_curve([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]).area == pytest.approx(1.0)

    def test_all_tied_is_half(self):
        assert roc_curve([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5]).area == pytest.approx(0.5)

    def test_pairwise_concordance_example(self):
        # 3 of 4 pos/neg pairs concordant
        area = roc_curve([1, 0, 1, 0], [0.6, 0.7, 0.8, 0.2]).area
        assert area == pytest.approx(0.75, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassDataset):
            roc_curve([1, 1], [0.1, 0.2])

    def test_equals_concordance_oracle(self, rng):
        for tie_prone in (False, True):
            for _ in range(20):
                labels, scores = random_instance(rng, tie_prone=tie_prone)
                area = roc_curve(labels, scores).area
                assert area == pytest.approx(auc_concordance(labels, scores), abs=1e-12)

    def test_points_monotone(self, rng):
        labels, scores = random_instance(rng, tie_prone=True)
        pts = roc_curve(labels, scores).points
        xs = [p[0] for p in pts]
        assert xs == sorted(xs)
        assert pts[0] == (0.0, 0.0)
        assert pts[-1] == (1.0, 1.0)


class TestPrCurve:
    def test_perfect_separation(self):
        assert pr_curve([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]).area == pytest.approx(1.0)

    def test_constant_scores_area_is_prevalence(self):
        labels = [1, 0, 0, 0, 1]
        area = pr_curve(labels, [0.3] * 5).area
        assert area == pytest.approx(2 / 5, abs=1e-12)

    def test_four_point_brute_force(self):
        labels = [1, 0, 1, 0]
        scores = [0.6, 0.7, 0.8, 0.2]
        assert pr_curve(labels, scores).area == pytest.approx(pr_auc_brute(labels, scores), abs=1e-12)

    def test_equals_enumeration_oracle(self, rng):
        for tie_prone in (False, True):
            for _ in range(20):
                labels, scores = random_instance(rng, tie_prone=tie_prone)
                area = pr_curve(labels, scores).area
                assert area == pytest.approx(pr_auc_brute(labels, scores), abs=1e-12)


class TestKs:
    def test_disjoint_supports_give_100(self):
        labels = [1, 1, 0, 0]
        scores = [0.2, 0.4, 0.6, 0.8]
        assert ks_statistic(labels, scores)[0] == pytest.approx(100.0)

    def test_identical_multisets_give_0(self):
        labels = [1, 1, 0, 0]
        scores = [0.3, 0.7, 0.3, 0.7]
        assert ks_statistic(labels, scores)[0] == pytest.approx(0.0)

    def test_interleaved_gives_50(self):
        labels = [1, 0, 1, 0]
        scores = [0.2, 0.4, 0.6, 0.8]
        assert ks_statistic(labels, scores)[0] == pytest.approx(50.0)

    def test_equals_brute_force(self, rng):
        for tie_prone in (False, True):
            for _ in range(20):
                labels, scores = random_instance(rng, tie_prone=tie_prone)
                ks, _ = ks_statistic(labels, scores)
                assert ks == ks_brute(labels, scores)

    def test_curve_sup_matches_statistic(self, rng):
        labels, scores = random_instance(rng)
        ks, curve = ks_statistic(labels, scores)
        assert max(y for _, y in curve.points) == pytest.approx(ks / 100.0)
        assert curve.area == pytest.approx(ks / 100.0)


class TestMonotoneTransformInvariance:
    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_rank_metrics_invariant_log_loss_not(self, seed):
        rng = np.random.default_rng(seed)
        labels, scores = random_instance(rng, n=30)
        scores = 0.05 + 0.9 * scores  # keep strictly inside (0,1)
        transformed = np.exp(3.0 * scores)  # strictly increasing
        assert roc_curve(labels, transformed).area == pytest.approx(
            roc_curve(labels, scores).area, abs=1e-12
        )
        assert pr_curve(labels, transformed).area == pytest.approx(
            pr_curve(labels, scores).area, abs=1e-12
        )
        assert ks_statistic(labels, transformed)[0] == pytest.approx(
            ks_statistic(labels, scores)[0], abs=1e-12
        )
        # calibration-sensitive measures must move
        squashed = scores**2
        assert log_loss(labels, squashed) != pytest.approx(log_loss(labels, scores), abs=1e-12)
        before = [b.observed_rate for b in reliability_curve(labels, scores, 5)]
        after = [b.observed_rate for b in reliability_curve(labels, squashed, 5)]
        assert before != after


class TestReliability:
    def test_constant_predictor_single_bin(self):
        labels = [0, 0, 0, 1]
        bins = reliability_curve(labels, [0.25] * 4, 10)
        occupied = [b for b in bins if b.count]
        assert len(occupied) == 1
        assert occupied[0].observed_rate == pytest.approx(0.25)
        assert occupied[0].mean_predicted == pytest.approx(0.25)

    def test_edges_go_to_lower_bin_except_top(self):
        bins = reliability_curve([0, 0, 0], [0.5, 1.0, 0.0], 4)
        # 0.5 is the upper edge of bin 1 ([0.25, 0.5]); 1.0 tops out in bin 3
        assert bins[1].count == 1
        assert bins[3].count == 1
        assert bins[0].count == 1

    def test_empty_bins_emitted_with_flags(self):
        bins = reliability_curve([1], [0.95], 10)
        assert len(bins) == 10
        empty = bins[0]
        assert empty.count == 0
        assert empty.mean_predicted is None
        assert empty.observed_rate is None

    def test_grouping_oracle(self, rng):
        labels = (rng.random(200) < 0.3).astype(int)
        probs = rng.random(200)
        bins = reliability_curve(labels, probs, 10)
        expect = reliability_groups(labels, probs, 10)
        for b, (count, mean_p, rate) in zip(bins, expect):
            assert b.count == count
            if count:
                assert b.mean_predicted == pytest.approx(mean_p)
                assert b.observed_rate == pytest.approx(rate)

    def test_invalid_bin_count(self):
        with pytest.raises(InvalidBinCount):
            reliability_curve([1], [0.5], 0)


class TestEvalReport:
    def test_components_match_standalone(self, rng):
        labels, probs = random_instance(rng, n=60)
        report = evaluate(labels, probs, threshold=0.4, beta=2.0, n_bins=7)
        assert report.roc_auc == roc_curve(labels, probs).area
        assert report.pr_auc == pr_curve(labels, probs).area
        assert report.ks == ks_statistic(labels, probs)[0]
        assert report.log_loss == log_loss(labels, probs)
        assert report.confusion == confusion(labels, probs, 0.4)
        assert report.fbeta == fbeta(confusion(labels, probs, 0.4), 2.0)
        assert report.reliability == reliability_curve(labels, probs, 7)

    def test_fbeta_none_when_undefined(self):
        report = evaluate([1, 0], [0.1, 0.2], threshold=0.9)
        assert report.fbeta is None
