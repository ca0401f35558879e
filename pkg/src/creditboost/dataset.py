"""Columnar datasets: CSV ingestion with explicit missingness, labels and splits.

Internal label convention is Bad/default = 1, Good = 0; `load_csv` maps any
two-valued source encoding onto it via `label_positive`. Datasets are
immutable after construction, so they are safe to share across workers.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DegenerateClass,
    MissingColumn,
    MissingTimeValue,
    UnknownLabelValue,
    UnparseableNumeric,
)

DEFAULT_MISSING_MARKERS = frozenset({"", "NA", "NaN", "null"})


@dataclass(frozen=True)
class ColumnSchema:
    """Declares one CSV column: its name, value kind and modeling role."""

    name: str
    kind: str  # "numeric" | "categorical"
    role: str = "feature"  # "feature" | "label" | "exclude"

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise ValueError(f"kind must be numeric or categorical, got {self.kind!r}")
        if self.role not in ("feature", "label", "exclude"):
            raise ValueError(f"role must be feature, label or exclude, got {self.role!r}")


@dataclass(frozen=True)
class NumericColumn:
    name: str
    values: np.ndarray  # float64; value is undefined where missing is True
    missing: np.ndarray  # bool

    @property
    def kind(self) -> str:
        return "numeric"

    def take(self, idx: np.ndarray) -> "NumericColumn":
        return NumericColumn(self.name, self.values[idx], self.missing[idx])


@dataclass(frozen=True)
class CategoricalColumn:
    name: str
    codes: np.ndarray  # int32 category ids, -1 where missing
    categories: tuple  # id -> string, first-appearance order

    @property
    def kind(self) -> str:
        return "categorical"

    @property
    def missing(self) -> np.ndarray:
        return self.codes < 0

    def take(self, idx: np.ndarray) -> "CategoricalColumn":
        return CategoricalColumn(self.name, self.codes[idx], self.categories)

    def value_at(self, i: int):
        """Category string at row i, or None when missing."""
        code = self.codes[i]
        return None if code < 0 else self.categories[code]


Column = Union[NumericColumn, CategoricalColumn]


@dataclass(frozen=True)
class Dataset:
    """Immutable columnar table of features plus binary labels and row weights."""

    columns: tuple  # of Column, feature columns in schema order
    labels: np.ndarray  # int8, 1 = Bad (default), 0 = Good
    weights: np.ndarray = None

    def __post_init__(self):
        n = len(self.labels)
        if self.weights is None:
            object.__setattr__(self, "weights", np.ones(n))
        if len(self.weights) != n:
            raise ValueError("weights length does not match labels")
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")
        for col in self.columns:
            size = len(col.values) if col.kind == "numeric" else len(col.codes)
            if size != n:
                raise ValueError(f"column {col.name!r} length {size} != row count {n}")
        bad = set(np.unique(self.labels)) - {0, 1}
        if bad:
            raise ValueError(f"labels must be 0/1, found {sorted(bad)}")

    @property
    def row_count(self) -> int:
        return len(self.labels)

    @property
    def feature_names(self) -> list:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise MissingColumn(f"no column named {name!r}")

    def take(self, idx: Iterable[int]) -> "Dataset":
        idx = np.asarray(list(idx) if not isinstance(idx, np.ndarray) else idx)
        return Dataset(
            columns=tuple(c.take(idx) for c in self.columns),
            labels=self.labels[idx],
            weights=self.weights[idx],
        )

    def with_weights(self, weights: np.ndarray) -> "Dataset":
        return replace(self, weights=np.asarray(weights, dtype=float))


def _intern(raw: list, missing: list) -> CategoricalColumn:
    """Build a categorical column; category ids follow first appearance."""
    lookup = {}
    categories = []
    codes = np.empty(len(raw), dtype=np.int32)
    for i, (cell, is_missing) in enumerate(zip(raw, missing)):
        if is_missing:
            codes[i] = -1
            continue
        code = lookup.get(cell)
        if code is None:
            code = len(categories)
            lookup[cell] = code
            categories.append(cell)
        codes[i] = code
    return CategoricalColumn("", codes, tuple(categories))


def load_csv(
    path,
    schema: Sequence[ColumnSchema],
    missing_markers: Iterable[str] = DEFAULT_MISSING_MARKERS,
    label_positive: str = "1",
    delimiter: str = ",",
) -> Dataset:
    """Ingest a CSV file into a Dataset.

    The header must contain every schema column (extra file columns are
    ignored). Cells equal to a missing marker are flagged missing; numeric
    parse failures raise. The label column must hold at most two distinct
    values; cells equal to `label_positive` become 1 (Bad), the other value
    becomes 0 (Good).
    """
    schema = list(schema)
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise ValueError("schema column names must be unique")
    label_cols = [c for c in schema if c.role == "label"]
    if len(label_cols) != 1:
        raise ValueError("schema must declare exactly one label column")
    label_name = label_cols[0].name
    markers = set(missing_markers)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumn(f"{path}: empty file") from None
        pos = {name: i for i, name in enumerate(header)}
        for name in names:
            if name not in pos:
                raise MissingColumn(f"{path}: column {name!r} not in header")
        rows = list(reader)

    feature_schema = [c for c in schema if c.role == "feature"]
    raw = {c.name: [] for c in feature_schema}
    raw_labels = []
    for row in rows:
        for c in feature_schema:
            raw[c.name].append(row[pos[c.name]])
        raw_labels.append(row[pos[label_name]])

    columns = []
    for c in feature_schema:
        cells = raw[c.name]
        missing = [cell in markers for cell in cells]
        if c.kind == "numeric":
            values = np.zeros(len(cells))
            for i, (cell, is_missing) in enumerate(zip(cells, missing)):
                if is_missing:
                    values[i] = np.nan
                    continue
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise UnparseableNumeric(i, c.name, cell) from None
            columns.append(NumericColumn(c.name, values, np.asarray(missing)))
        else:
            col = _intern(cells, missing)
            columns.append(CategoricalColumn(c.name, col.codes, col.categories))

    labels = np.empty(len(raw_labels), dtype=np.int8)
    negative = None
    for i, cell in enumerate(raw_labels):
        if cell in markers:
            raise UnknownLabelValue(f"row {i}: label cell is missing")
        if cell == label_positive:
            labels[i] = 1
        else:
            if negative is None:
                negative = cell
            elif cell != negative:
                raise UnknownLabelValue(
                    f"row {i}: third label value {cell!r} (saw {label_positive!r} and {negative!r})"
                )
            labels[i] = 0

    return Dataset(columns=tuple(columns), labels=labels)


def save_csv(d: Dataset, path, missing_marker: str = "", label_name: str = "label", delimiter: str = ",") -> None:
    """Write a Dataset back to CSV; the inverse of `load_csv` on values and flags.

    Numeric cells are written with full round-trip precision; missing cells as
    `missing_marker`; labels as 1/0.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow([c.name for c in d.columns] + [label_name])
        for i in range(d.row_count):
            row = []
            for c in d.columns:
                if c.kind == "numeric":
                    row.append(missing_marker if c.missing[i] else repr(float(c.values[i])))
                else:
                    v = c.value_at(i)
                    row.append(missing_marker if v is None else v)
            row.append(str(int(d.labels[i])))
            writer.writerow(row)


def stratified_split(d: Dataset, test_fraction: float, seed: int) -> tuple:
    """Split into (train, test) preserving class prevalence within one row per class."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0,1)")
    classes = np.unique(d.labels)
    if len(classes) < 2:
        raise DegenerateClass("both classes must be present to stratify")
    rng = np.random.default_rng(seed)
    test_idx = []
    for k in classes:
        members = np.flatnonzero(d.labels == k)
        if len(members) < 2:
            raise DegenerateClass(f"class {k} has fewer than 2 rows")
        take = int(np.floor(len(members) * test_fraction + 0.5))
        test_idx.append(rng.permutation(members)[:take])
    test_idx = np.sort(np.concatenate(test_idx))
    mask = np.zeros(d.row_count, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    return d.take(train_idx), d.take(test_idx)


def temporal_split(d: Dataset, time_column: str, cutoff) -> tuple:
    """Split into (in-time, out-of-time): rows with time <= cutoff vs after."""
    col = d.column(time_column)
    if col.kind != "numeric":
        raise MissingTimeValue(f"time column {time_column!r} must be numeric")
    if col.missing.any():
        raise MissingTimeValue(f"time column {time_column!r} has missing values")
    in_time = np.flatnonzero(col.values <= cutoff)
    oot = np.flatnonzero(col.values > cutoff)
    return d.take(in_time), d.take(oot)
