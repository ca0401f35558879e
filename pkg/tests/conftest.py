import numpy as np
import pytest

from creditboost.dataset import CategoricalColumn, Dataset, NumericColumn


def make_dataset(numeric=None, categorical=None, labels=None, weights=None) -> Dataset:
    """Build a Dataset from plain lists; None cells mean missing."""
    columns = []
    for name, cells in (numeric or {}).items():
        values = np.array([np.nan if v is None else float(v) for v in cells])
        missing = np.array([v is None for v in cells])
        columns.append(NumericColumn(name, values, missing))
    for name, cells in (categorical or {}).items():
        lookup, cats, codes = {}, [], []
        for v in cells:
            if v is None:
                codes.append(-1)
                continue
            if v not in lookup:
                lookup[v] = len(cats)
                cats.append(v)
            codes.append(lookup[v])
        columns.append(CategoricalColumn(name, np.array(codes, dtype=np.int32), tuple(cats)))
    return Dataset(
        columns=tuple(columns),
        labels=np.asarray(labels, dtype=np.int8),
        weights=None if weights is None else np.asarray(weights, dtype=float),
    )


def random_numeric_dataset(rng, n_rows, n_features, missing_rate=0.0, weighted=False) -> Dataset:
    """Random numeric-feature dataset with both classes guaranteed present."""
    columns = []
    for j in range(n_features):
        values = rng.normal(size=n_rows)
        missing = rng.random(n_rows) < missing_rate
        values = values.copy()
        values[missing] = np.nan
        columns.append(NumericColumn(f"x{j}", values, missing))
    labels = (rng.random(n_rows) < rng.uniform(0.2, 0.8)).astype(np.int8)
    labels[0] = 0
    labels[1] = 1
    weights = rng.uniform(0.5, 2.0, size=n_rows) if weighted else None
    return Dataset(columns=tuple(columns), labels=labels, weights=weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
