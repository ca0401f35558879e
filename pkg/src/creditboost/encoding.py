"""Weight-of-Evidence encoding for categorical features.

A category's WOE compares its share of goods against its share of bads, on
the conventional x100 scale: good-heavy categories score positive, bad-heavy
negative. Laplace smoothing keeps every entry finite when a class count is
zero. Missing cells form their own pseudo-category, keyed None.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import CategoricalColumn, Dataset
from .errors import NotCategorical, SingleClassDataset


@dataclass(frozen=True)
class WoeMap:
    """Fitted encoding for one column: per-category counts and WOE values."""

    column: str
    entries: dict  # category (str, or None for missing) -> (goods, bads, woe)
    unseen_woe: float = 0.0
    smoothing: float = 0.5

    def woe(self, category) -> float:
        entry = self.entries.get(category)
        return self.unseen_woe if entry is None else entry[2]


def _woe_value(goods: int, bads: int, goods_total: int, bads_total: int, s: float) -> float:
    good_share = (goods + s) / (goods_total + 2 * s)
    bad_share = (bads + s) / (bads_total + 2 * s)
    return math.log(good_share / bad_share) * 100.0


def fit_woe(d: Dataset, column: str, smoothing: float = 0.5, unseen_woe: float = 0.0) -> WoeMap:
    """Fit a WoeMap on one categorical column of a labeled dataset."""
    col = d.column(column)
    if col.kind != "categorical":
        raise NotCategorical(f"column {column!r} is {col.kind}, not categorical")
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    labels = d.labels
    goods_total = int(np.sum(labels == 0))
    bads_total = int(np.sum(labels == 1))
    if goods_total == 0 or bads_total == 0:
        raise SingleClassDataset("both classes required to fit WOE")

    codes = col.codes
    n_cats = len(col.categories)
    goods_by_cat = np.bincount(codes[(labels == 0) & (codes >= 0)], minlength=n_cats)
    bads_by_cat = np.bincount(codes[(labels == 1) & (codes >= 0)], minlength=n_cats)

    entries = {}
    for i, cat in enumerate(col.categories):
        g, b = int(goods_by_cat[i]), int(bads_by_cat[i])
        entries[cat] = (g, b, _woe_value(g, b, goods_total, bads_total, smoothing))
    if (codes < 0).any():
        g = int(np.sum((codes < 0) & (labels == 0)))
        b = int(np.sum((codes < 0) & (labels == 1)))
        entries[None] = (g, b, _woe_value(g, b, goods_total, bads_total, smoothing))
    return WoeMap(column=column, entries=entries, unseen_woe=unseen_woe, smoothing=smoothing)


def apply_woe(m: WoeMap, values) -> np.ndarray:
    """Encode category values to their WOE. Total: unseen categories map to
    `unseen_woe`, missing cells to the missing pseudo-category (or unseen_woe
    if fit never saw a missing cell)."""
    if isinstance(values, CategoricalColumn):
        lut = np.array([m.woe(c) for c in values.categories] or [0.0])
        out = np.where(values.codes < 0, m.woe(None), lut[np.clip(values.codes, 0, None)])
        return out.astype(float)
    return np.array([m.woe(v) for v in values], dtype=float)


def export_mapping(m: WoeMap) -> list:
    """Dump (category, good_count, bad_count, woe) rows, sorted by woe descending."""
    rows = [(cat, goods, bads, woe) for cat, (goods, bads, woe) in m.entries.items()]
    rows.sort(key=lambda r: -r[3])
    return rows


def woe_map_from_rows(column: str, rows, unseen_woe: float = 0.0, smoothing: float = 0.5) -> WoeMap:
    """Rebuild a WoeMap from `export_mapping` rows (lossless round trip)."""
    entries = {cat: (int(goods), int(bads), float(woe)) for cat, goods, bads, woe in rows}
    return WoeMap(column=column, entries=entries, unseen_woe=unseen_woe, smoothing=smoothing)
