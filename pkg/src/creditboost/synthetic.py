"""Seeded synthetic loan portfolio for benchmarks, demos and tests.

The latent log-odds mix multiplicative and threshold interactions that a
single split cannot capture, plus a categorical region effect, informative
missingness on income, and a mild drift over the application month so an
out-of-time window behaves like one. The intercept is solved by bisection so
the portfolio hits the requested bad rate.
"""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from .dataset import CategoricalColumn, ColumnSchema, Dataset, NumericColumn

REGIONS = ("NE", "SE", "MW", "SW", "W", "NW", "MT", "PR")
REGION_EFFECT = (0.30, 0.55, 0.10, 0.45, -0.10, -0.25, 0.20, 0.65)
CHANNELS = ("dealer", "direct", "broker")
CHANNEL_EFFECT = (0.25, -0.30, 0.10)


def schema() -> list:
    """Column schema matching `synthetic_portfolio` CSV exports."""
    return [
        ColumnSchema("util", "numeric"),
        ColumnSchema("dti", "numeric"),
        ColumnSchema("ltv", "numeric"),
        ColumnSchema("file_age", "numeric"),
        ColumnSchema("inquiries", "numeric"),
        ColumnSchema("income", "numeric"),
        ColumnSchema("app_month", "numeric"),
        ColumnSchema("region", "categorical"),
        ColumnSchema("channel", "categorical"),
        ColumnSchema("label", "categorical", role="label"),
    ]


def _calibrate_intercept(eta: np.ndarray, bad_rate: float) -> float:
    lo, hi = -30.0, 30.0
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if float(np.mean(expit(eta + mid))) < bad_rate:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def synthetic_portfolio(n_rows: int = 50_000, bad_rate: float = 0.05, seed: int = 7) -> Dataset:
    """Generate a labeled loan portfolio with nonlinear risk structure."""
    rng = np.random.default_rng(seed)
    util = rng.random(n_rows) ** 0.7
    dti = np.clip(rng.lognormal(mean=-1.2, sigma=0.5, size=n_rows), 0.0, 1.5)
    ltv = rng.uniform(0.3, 1.4, size=n_rows)
    file_age = rng.uniform(0.0, 300.0, size=n_rows)
    inquiries = rng.integers(0, 11, size=n_rows).astype(float)
    log_income = rng.normal(11.0, 0.45, size=n_rows)
    income = np.exp(log_income)
    app_month = rng.integers(0, 36, size=n_rows).astype(float)
    region_codes = rng.integers(0, len(REGIONS), size=n_rows).astype(np.int32)
    channel_codes = rng.integers(0, len(CHANNELS), size=n_rows).astype(np.int32)

    # informative missingness: riskier applicants skip income more often
    miss_p = 0.06 + 0.12 * util
    income_missing = rng.random(n_rows) < miss_p

    eta = (
        2.2 * util * (dti / 0.45)
        + 1.1 * ((ltv > 1.05) & (inquiries >= 4))
        + 0.9 * np.maximum(0.0, 1.0 - file_age / 120.0)
        + np.asarray(REGION_EFFECT)[region_codes]
        + np.asarray(CHANNEL_EFFECT)[channel_codes]
        + 0.55 * income_missing
        - 0.75 * (log_income - 11.0)
        + 0.12 * (app_month / 35.0)
        + 0.45 * rng.normal(size=n_rows)
    )
    eta += _calibrate_intercept(eta, bad_rate)
    labels = (rng.random(n_rows) < expit(eta)).astype(np.int8)

    no_missing = np.zeros(n_rows, dtype=bool)
    income_values = income.copy()
    income_values[income_missing] = np.nan
    columns = (
        NumericColumn("util", util, no_missing),
        NumericColumn("dti", dti, no_missing.copy()),
        NumericColumn("ltv", ltv, no_missing.copy()),
        NumericColumn("file_age", file_age, no_missing.copy()),
        NumericColumn("inquiries", inquiries, no_missing.copy()),
        NumericColumn("income", income_values, income_missing),
        NumericColumn("app_month", app_month, no_missing.copy()),
        CategoricalColumn("region", region_codes, REGIONS),
        CategoricalColumn("channel", channel_codes, CHANNELS),
    )
    return Dataset(columns=columns, labels=labels)
