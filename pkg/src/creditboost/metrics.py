"""Evaluation measures for binary classifiers on imbalanced data.

Scores are oriented so that higher means riskier (probability of the Bad
class). Rank metrics (ROC AUC, PR AUC, KS) are invariant to strictly
increasing transforms of the scores; log-loss and reliability are not.

Interpolation rules, pinned so numbers are reproducible:
  * ROC area: trapezoid, with tied scores collapsed to one threshold. This
    equals the pairwise concordance probability with half credit for ties.
  * PR area: right-step (no trapezoid; trapezoid overstates PR area).
  * KS: exact sup over all distinct scores of |CDF_bad - CDF_good|, x100.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    InvalidBinCount,
    LengthMismatch,
    SingleClassDataset,
    UndefinedPrecision,
    UndefinedRecall,
)

PROB_EPS = 1e-15


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class CurveData:
    """Ordered (x, y) points plus the scalar the curve aggregates to.

    For ROC the area is trapezoidal, for PR right-step. For the KS trace the
    aggregate is the supremum of y (not an integral), stored on the same
    slot scaled to [0, 1].
    """

    points: tuple  # of (x, y)
    area: float


@dataclass(frozen=True)
class ReliabilityBin:
    center: float
    mean_predicted: Optional[float]  # None when the bin is empty
    observed_rate: Optional[float]
    count: int


@dataclass(frozen=True)
class EvalReport:
    ks: float
    ks_curve: CurveData
    roc_curve: CurveData
    pr_curve: CurveData
    log_loss: float
    threshold: float
    beta: float
    fbeta: Optional[float]
    confusion: ConfusionMatrix
    reliability: tuple  # of ReliabilityBin

    @property
    def roc_auc(self) -> float:
        return self.roc_curve.area

    @property
    def pr_auc(self) -> float:
        return self.pr_curve.area


def _check_paired(labels, scores):
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    if len(labels) != len(scores):
        raise LengthMismatch(f"{len(labels)} labels vs {len(scores)} scores")
    return labels, scores


def _check_two_classes(labels):
    if len(np.unique(labels)) < 2:
        raise SingleClassDataset("metric needs both classes present")


def log_loss(labels, probs) -> float:
    """Mean binary cross-entropy with probabilities clamped away from 0 and 1."""
    labels, probs = _check_paired(labels, probs)
    p = np.clip(probs, PROB_EPS, 1 - PROB_EPS)
    return float(-np.mean(labels * np.log(p) + (1 - labels) * np.log(1 - p)))


def confusion(labels, probs, threshold: float) -> ConfusionMatrix:
    """Counts at a probability cutoff; predicted positive when p >= threshold."""
    labels, probs = _check_paired(labels, probs)
    pred = probs >= threshold
    pos = labels == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        tn=int(np.sum(~pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
    )


def precision_recall(cm: ConfusionMatrix) -> tuple:
    if cm.tp + cm.fp == 0:
        raise UndefinedPrecision("no predicted positives")
    if cm.tp + cm.fn == 0:
        raise UndefinedRecall("no actual positives")
    return cm.tp / (cm.tp + cm.fp), cm.tp / (cm.tp + cm.fn)


def fbeta(cm: ConfusionMatrix, beta: float) -> float:
    p, r = precision_recall(cm)
    if p == 0.0 and r == 0.0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * p * r / (b2 * p + r)


def _threshold_sweep(labels, scores):
    """Cumulative positive/negative counts at each distinct score, descending.

    Returns (thresholds desc, cum_pos, cum_neg, n_pos, n_neg); tied scores
    collapse to a single threshold.
    """
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    boundary = np.flatnonzero(np.diff(s) != 0)
    last = np.concatenate([boundary, [len(s) - 1]])
    cum_pos = np.cumsum(y == 1)[last]
    cum_neg = np.cumsum(y == 0)[last]
    return s[last], cum_pos, cum_neg, int(np.sum(labels == 1)), int(np.sum(labels == 0))


def roc_curve(labels, scores) -> CurveData:
    """ROC points (FPR, TPR) from (0,0) to (1,1); trapezoid area."""
    labels, scores = _check_paired(labels, scores)
    _check_two_classes(labels)
    _, cum_pos, cum_neg, n_pos, n_neg = _threshold_sweep(labels, scores)
    tpr = np.concatenate([[0.0], cum_pos / n_pos])
    fpr = np.concatenate([[0.0], cum_neg / n_neg])
    area = float(np.trapezoid(tpr, fpr))
    return CurveData(points=tuple(zip(fpr.tolist(), tpr.tolist())), area=area)


def pr_curve(labels, scores) -> CurveData:
    """Precision-recall points swept threshold-descending; right-step area."""
    labels, scores = _check_paired(labels, scores)
    _check_two_classes(labels)
    _, cum_pos, cum_neg, n_pos, _ = _threshold_sweep(labels, scores)
    recall = cum_pos / n_pos
    precision = cum_pos / (cum_pos + cum_neg)
    steps = np.diff(np.concatenate([[0.0], recall]))
    area = float(np.sum(steps * precision))
    xs = np.concatenate([[0.0], recall])
    ys = np.concatenate([[precision[0]], precision])
    return CurveData(points=tuple(zip(xs.tolist(), ys.tolist())), area=area)


def class_cdfs(labels, scores):
    """Empirical per-class CDFs over all distinct scores, ascending.

    Returns (thresholds, cdf_good, cdf_bad) where cdf is P(score <= t | class).
    """
    labels, scores = _check_paired(labels, scores)
    _check_two_classes(labels)
    order = np.argsort(scores, kind="stable")
    s = scores[order]
    y = labels[order]
    boundary = np.flatnonzero(np.diff(s) != 0)
    last = np.concatenate([boundary, [len(s) - 1]])
    n_bad = np.sum(labels == 1)
    n_good = np.sum(labels == 0)
    cdf_bad = np.cumsum(y == 1)[last] / n_bad
    cdf_good = np.cumsum(y == 0)[last] / n_good
    return s[last], cdf_good, cdf_bad


def ks_statistic(labels, scores) -> tuple:
    """Max gap between per-class score CDFs on the 0-100 scale, plus the gap trace."""
    thresholds, cdf_good, cdf_bad = class_cdfs(labels, scores)
    gap = np.abs(cdf_bad - cdf_good)
    ks = float(100.0 * np.max(gap))
    curve = CurveData(points=tuple(zip(thresholds.tolist(), gap.tolist())), area=ks / 100.0)
    return ks, curve


def reliability_curve(labels, probs, n_bins: int) -> tuple:
    """Equal-width calibration bins over [0,1].

    Edge values belong to the lower bin (except 0.0, which has no lower bin);
    empty bins are emitted with count 0 and None rates.
    """
    if n_bins < 1:
        raise InvalidBinCount(f"n_bins must be >= 1, got {n_bins}")
    labels, probs = _check_paired(labels, probs)
    idx = np.maximum(np.ceil(probs * n_bins).astype(int) - 1, 0)
    idx = np.minimum(idx, n_bins - 1)
    bins = []
    for b in range(n_bins):
        members = idx == b
        count = int(np.sum(members))
        bins.append(
            ReliabilityBin(
                center=(b + 0.5) / n_bins,
                mean_predicted=float(np.mean(probs[members])) if count else None,
                observed_rate=float(np.mean(labels[members])) if count else None,
                count=count,
            )
        )
    return tuple(bins)


def evaluate(labels, probs, threshold: float = 0.5, beta: float = 1.0, n_bins: int = 10) -> EvalReport:
    """Bundle every standalone metric over one (labels, probabilities) pair."""
    labels, probs = _check_paired(labels, probs)
    cm = confusion(labels, probs, threshold)
    try:
        fb = fbeta(cm, beta)
    except (UndefinedPrecision, UndefinedRecall):
        fb = None
    ks, ks_curve = ks_statistic(labels, probs)
    return EvalReport(
        ks=ks,
        ks_curve=ks_curve,
        roc_curve=roc_curve(labels, probs),
        pr_curve=pr_curve(labels, probs),
        log_loss=log_loss(labels, probs),
        threshold=threshold,
        beta=beta,
        fbeta=fb,
        confusion=cm,
        reliability=reliability_curve(labels, probs, n_bins),
    )


def report_to_dict(r: EvalReport) -> dict:
    """JSON-ready view of an EvalReport (curve points included)."""
    return {
        "ks": r.ks,
        "roc_auc": r.roc_auc,
        "pr_auc": r.pr_auc,
        "log_loss": r.log_loss,
        "threshold": r.threshold,
        "beta": r.beta,
        "fbeta": r.fbeta,
        "confusion": {"tp": r.confusion.tp, "fp": r.confusion.fp, "tn": r.confusion.tn, "fn": r.confusion.fn},
        "reliability": [
            {
                "center": b.center,
                "mean_predicted": b.mean_predicted,
                "observed_rate": b.observed_rate,
                "count": b.count,
            }
            for b in r.reliability
        ],
        "roc_points": [list(p) for p in r.roc_curve.points],
        "pr_points": [list(p) for p in r.pr_curve.points],
        "ks_points": [list(p) for p in r.ks_curve.points],
    }
