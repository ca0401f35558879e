"""Exact Shapley attributions for model outputs, plus the data behind
summary, dependence and force displays.

Masked features are handled interventionally: a coalition's value is the
model margin averaged over composite rows that take present features from
the explained row and absent ones from an explicit background sample.
Attributions live on the margin (log-odds) scale, where tree additivity
makes the base value plus contributions reproduce the output exactly.

Exact enumeration over all 2^M coalitions; M is capped at 16.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .booster import BoostedModel, encode_features, margins_for_matrix
from .dataset import Dataset
from .errors import EmptyBackground, TooManyFeatures, UnknownFeature

MAX_EXACT_FEATURES = 16

# A coalition mask is a length-M vector of 0/1 flags, 1 = feature present.
CoalitionMask = np.ndarray


@dataclass(frozen=True)
class BackgroundSet:
    """Reference rows (encoded feature space) used to stand in for masked
    features, drawn deterministically from training data."""

    rows: np.ndarray
    seed: int = 0

    def __post_init__(self):
        if len(self.rows) == 0:
            raise EmptyBackground("background set must be non-empty")

    @classmethod
    def from_dataset(cls, model: BoostedModel, d: Dataset, size: int = 100, seed: int = 0) -> "BackgroundSet":
        X = encode_features(model, d)
        if len(X) == 0:
            raise EmptyBackground("dataset has no rows to draw from")
        rng = np.random.default_rng(seed)
        take = min(size, len(X))
        idx = np.sort(rng.choice(len(X), size=take, replace=False))
        return cls(rows=X[idx], seed=seed)


@dataclass(frozen=True)
class Attribution:
    """Additive decomposition of one model output: phi0 + sum(phi) = output."""

    phi0: float
    phi: np.ndarray
    feature_names: tuple
    output: float  # margin-scale model output for the explained row
    row: np.ndarray  # encoded feature values of the explained row


@dataclass(frozen=True)
class AxiomReport:
    local_accuracy_pass: bool
    local_accuracy_residual: float
    missingness_pass: bool
    missingness_failures: tuple


def coalition_value(scorer: Callable, x: np.ndarray, mask, bg: BackgroundSet) -> float:
    """Mean margin over composite rows: x where the mask is set, background
    elsewhere."""
    x = np.asarray(x, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise ValueError(f"mask length {mask.shape} != feature count {x.shape}")
    composite = np.where(mask[None, :], x[None, :], bg.rows)
    return float(np.mean(scorer(composite)))


def shapley_exact(scorer: Callable, x: np.ndarray, bg: BackgroundSet) -> Attribution:
    """Attributions by full coalition enumeration with the classic weights
    |S|! (M-|S|-1)! / M! on each marginal contribution."""
    x = np.asarray(x, dtype=float)
    m = len(x)
    if m > MAX_EXACT_FEATURES:
        raise TooManyFeatures(f"{m} features; exact enumeration capped at {MAX_EXACT_FEATURES}")

    values = np.empty(1 << m)
    for bits in range(1 << m):
        mask = np.array([(bits >> i) & 1 for i in range(m)], dtype=bool)
        values[bits] = coalition_value(scorer, x, mask, bg)

    fact = [math.factorial(i) for i in range(m + 1)]
    weight = [fact[s] * fact[m - s - 1] / fact[m] for s in range(m)]
    phi = np.zeros(m)
    for i in range(m):
        for bits in range(1 << m):
            if bits & (1 << i):
                continue
            size = bin(bits).count("1")
            phi[i] += weight[size] * (values[bits | (1 << i)] - values[bits])

    return Attribution(
        phi0=float(values[0]),
        phi=phi,
        feature_names=tuple(f"f{i}" for i in range(m)),
        output=float(values[(1 << m) - 1]),
        row=x,
    )


def verify_axioms(scorer: Callable, x, bg: BackgroundSet, attribution: Attribution, tol: float = 1e-9) -> AxiomReport:
    """Check local accuracy (base + contributions reproduce the output) and
    missingness (features identical in x and every background row get 0)."""
    x = np.asarray(x, dtype=float)
    full = coalition_value(scorer, x, np.ones(len(x), dtype=bool), bg)
    residual = abs(full - attribution.phi0 - float(np.sum(attribution.phi)))
    constant = np.all(bg.rows == x[None, :], axis=0)
    failures = tuple(
        attribution.feature_names[i]
        for i in np.flatnonzero(constant)
        if abs(attribution.phi[i]) > tol
    )
    return AxiomReport(
        local_accuracy_pass=residual < tol,
        local_accuracy_residual=float(residual),
        missingness_pass=not failures,
        missingness_failures=failures,
    )


def model_scorer(model: BoostedModel) -> Callable:
    """Margin-scale scorer over encoded row matrices, for attribution."""

    def scorer(X):
        return margins_for_matrix(model, np.asarray(X, dtype=float))

    return scorer


def explain_rows(model: BoostedModel, d: Dataset, row_indices: Sequence[int], bg: BackgroundSet) -> list:
    """Exact attributions for selected dataset rows against the background."""
    X = encode_features(model, d)
    scorer = model_scorer(model)
    out = []
    for i in row_indices:
        attr = shapley_exact(scorer, X[int(i)], bg)
        out.append(
            Attribution(
                phi0=attr.phi0,
                phi=attr.phi,
                feature_names=model.feature_names,
                output=attr.output,
                row=attr.row,
            )
        )
    return out


@dataclass(frozen=True)
class FeatureSummary:
    feature: str
    mean_abs_phi: float
    points: tuple  # per-row (phi, feature value)


def summary_data(attributions: Sequence[Attribution]) -> list:
    """Per-feature impact summary, ranked by mean |phi| descending."""
    if not attributions:
        return []
    names = attributions[0].feature_names
    phis = np.vstack([a.phi for a in attributions])
    rows = np.vstack([a.row for a in attributions])
    mean_abs = np.mean(np.abs(phis), axis=0)
    order = sorted(range(len(names)), key=lambda i: (-mean_abs[i], i))
    return [
        FeatureSummary(
            feature=names[i],
            mean_abs_phi=float(mean_abs[i]),
            points=tuple(zip(phis[:, i].tolist(), rows[:, i].tolist())),
        )
        for i in order
    ]


def dependence_data(attributions: Sequence[Attribution], feature: str, color_feature: str) -> list:
    """One (feature value, phi, color value) row per attribution, unaggregated."""
    if not attributions:
        return []
    names = attributions[0].feature_names
    if feature not in names:
        raise UnknownFeature(f"no feature named {feature!r}")
    if color_feature not in names:
        raise UnknownFeature(f"no feature named {color_feature!r}")
    fi = names.index(feature)
    ci = names.index(color_feature)
    return [(float(a.row[fi]), float(a.phi[fi]), float(a.row[ci])) for a in attributions]


def force_data(attribution: Attribution) -> dict:
    """Per-feature pushes from the base value to the output, largest first.

    Zero contributions are dropped; direction is the sign of phi.
    """
    order = sorted(
        range(len(attribution.phi)),
        key=lambda i: (-abs(attribution.phi[i]), i),
    )
    pushes = [
        (attribution.feature_names[i], float(attribution.phi[i]), 1 if attribution.phi[i] > 0 else -1)
        for i in order
        if attribution.phi[i] != 0.0
    ]
    return {"base_value": attribution.phi0, "output_value": attribution.output, "pushes": pushes}
