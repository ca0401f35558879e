"""Class-imbalance remedies: loss reweighting and SMOTE oversampling.

Reweighting rescales each class's loss contribution so the training measure
matches a target measure: weight(k) = target_cost(k) * target_prior(k) /
train_prior(k). It is exposed as sample weights for the booster rather than
as row duplication, which keeps the change of measure explicit.

SMOTE synthesizes minority rows as convex combinations x + u * (nn - x) of a
minority row and one of its k nearest minority neighbors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Dataset, NumericColumn
from .errors import (
    MissingInMinority,
    NonNumericFeature,
    SingleClassDataset,
    TooFewMinority,
)


@dataclass(frozen=True)
class ReweightSpec:
    """Target measure for loss reweighting over classes {0, 1}.

    `target_prior[k]` and `target_cost[k]` index by class label. When
    `train_prior` is None it is measured from the labels at reweighting time.
    """

    target_prior: tuple  # (prior of class 0, prior of class 1)
    target_cost: tuple = (1.0, 1.0)
    train_prior: Optional[tuple] = None

    def __post_init__(self):
        for name, priors in (("target_prior", self.target_prior), ("train_prior", self.train_prior)):
            if priors is None:
                continue
            if not all(0 < p < 1 for p in priors):
                raise ValueError(f"{name} entries must be in (0,1)")
            if abs(sum(priors) - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1")
        if not all(c > 0 for c in self.target_cost):
            raise ValueError("target_cost entries must be positive")


@dataclass(frozen=True)
class SmoteConfig:
    k_neighbors: int = 5
    target_ratio: float = 1.0  # minority/majority after augmentation
    seed: int = 0

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0 < self.target_ratio <= 1:
            raise ValueError("target_ratio must be in (0,1]")


def reweight(labels: np.ndarray, spec: ReweightSpec) -> np.ndarray:
    """Per-row weights C_t(k) * target_prior(k) / train_prior(k) by class."""
    labels = np.asarray(labels)
    if len(np.unique(labels)) < 2:
        raise SingleClassDataset("both classes required to reweight")
    if spec.train_prior is not None:
        train_prior = np.asarray(spec.train_prior, dtype=float)
    else:
        n = len(labels)
        train_prior = np.array([np.sum(labels == 0) / n, np.sum(labels == 1) / n])
    per_class = np.asarray(spec.target_cost, dtype=float) * np.asarray(spec.target_prior, dtype=float) / train_prior
    return per_class[labels]


def measured_prior(labels: np.ndarray) -> tuple:
    labels = np.asarray(labels)
    n = len(labels)
    return (float(np.sum(labels == 0) / n), float(np.sum(labels == 1) / n))


def _feature_matrix(d: Dataset) -> np.ndarray:
    cols = []
    for c in d.columns:
        if c.kind != "numeric":
            raise NonNumericFeature(f"column {c.name!r} is categorical; encode before SMOTE")
        values = c.values.astype(float).copy()
        values[c.missing] = np.nan
        cols.append(values)
    return np.column_stack(cols) if cols else np.empty((d.row_count, 0))


def smote(d: Dataset, cfg: SmoteConfig) -> Dataset:
    """Oversample the minority class up to `target_ratio` of the majority.

    Draw order with the single seeded generator: base-row picks, then
    neighbor picks, then interpolation coefficients. Originals pass through
    unchanged; synthetic rows get weight 1.0 and the minority label.
    """
    x = _feature_matrix(d)
    counts = np.bincount(d.labels, minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise SingleClassDataset("both classes required for SMOTE")
    minority_label = int(np.argmin(counts))
    minority_idx = np.flatnonzero(d.labels == minority_label)
    n_min, n_maj = counts[minority_label], counts[1 - minority_label]

    if n_min < cfg.k_neighbors + 1:
        raise TooFewMinority(f"need at least k_neighbors+1={cfg.k_neighbors + 1} minority rows, have {n_min}")
    minority = x[minority_idx]
    if np.isnan(minority).any():
        raise MissingInMinority("minority rows must have no missing values")

    n_target = int(np.floor(cfg.target_ratio * n_maj + 0.5))
    n_new = n_target - n_min
    if n_new <= 0:
        return d

    # pairwise Euclidean distances among minority rows; ties broken by row index
    sq = np.sum(minority**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (minority @ minority.T)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, : cfg.k_neighbors]

    rng = np.random.default_rng(cfg.seed)
    base = rng.integers(0, n_min, size=n_new)
    pick = rng.integers(0, cfg.k_neighbors, size=n_new)
    u = rng.random(size=n_new)
    nn = neighbors[base, pick]
    synthetic = minority[base] + u[:, None] * (minority[nn] - minority[base])

    columns = []
    for j, c in enumerate(d.columns):
        values = np.concatenate([c.values, synthetic[:, j]])
        missing = np.concatenate([c.missing, np.zeros(n_new, dtype=bool)])
        columns.append(NumericColumn(c.name, values, missing))
    labels = np.concatenate([d.labels, np.full(n_new, minority_label, dtype=np.int8)])
    weights = np.concatenate([d.weights, np.ones(n_new)])
    return Dataset(columns=tuple(columns), labels=labels, weights=weights)
