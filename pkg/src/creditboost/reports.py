"""Decision-support reports: swap sets between two scoring models and
score-distribution tables.

Scorecard convention: lower score = riskier, so the "worst" set is the
bottom tail. Pass higher_is_riskier=True for PD-like scores. Quantile ties
are kept inclusively and the reported counts are actual set sizes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidBinCount, LengthMismatch


@dataclass(frozen=True)
class ModelCapture:
    """Composition of one model's worst-cutoff set."""

    total: int
    bads: int
    goods: int

    @property
    def bad_rate(self) -> float:
        return self.bads / self.total if self.total else float("nan")


@dataclass(frozen=True)
class SwapSetTable:
    cutoff_pct: float
    nominal_count: int
    capture_a: ModelCapture
    capture_b: ModelCapture
    swapped_in: int  # rows in A's worst set only
    swapped_out: int  # rows in B's worst set only


def _worst_mask(scores: np.ndarray, nominal: int) -> np.ndarray:
    # cutoff = nominal-th smallest score; ties at the cutoff are kept
    cutoff = np.partition(scores, nominal - 1)[nominal - 1]
    return scores <= cutoff


def swap_set(scores_a, scores_b, labels, cutoff_pct: float, higher_is_riskier: bool = False) -> SwapSetTable:
    """Compare which rows two models place inside their worst cutoff_pct."""
    scores_a = np.asarray(scores_a, dtype=float)
    scores_b = np.asarray(scores_b, dtype=float)
    labels = np.asarray(labels)
    if not (len(scores_a) == len(scores_b) == len(labels)):
        raise LengthMismatch(
            f"lengths differ: {len(scores_a)} scores_a, {len(scores_b)} scores_b, {len(labels)} labels"
        )
    if not 0 < cutoff_pct < 100:
        raise ValueError("cutoff_pct must be in (0,100)")
    if higher_is_riskier:
        scores_a, scores_b = -scores_a, -scores_b
    n = len(labels)
    nominal = max(1, int(np.floor(n * cutoff_pct / 100.0 + 0.5)))
    in_a = _worst_mask(scores_a, nominal)
    in_b = _worst_mask(scores_b, nominal)

    def capture(mask):
        return ModelCapture(
            total=int(mask.sum()),
            bads=int(np.sum(mask & (labels == 1))),
            goods=int(np.sum(mask & (labels == 0))),
        )

    return SwapSetTable(
        cutoff_pct=cutoff_pct,
        nominal_count=nominal,
        capture_a=capture(in_a),
        capture_b=capture(in_b),
        swapped_in=int(np.sum(in_a & ~in_b)),
        swapped_out=int(np.sum(in_b & ~in_a)),
    )


def swap_set_rows(table: SwapSetTable, name_a: str = "A", name_b: str = "B") -> list:
    """CSV-ready rows mirroring the usual swap-set layout."""
    return [
        ("metric", name_a, name_b),
        (f"worst {table.cutoff_pct:g}% bad rate", f"{table.capture_a.bad_rate:.4f}", f"{table.capture_b.bad_rate:.4f}"),
        ("total", table.capture_a.total, table.capture_b.total),
        ("bads", table.capture_a.bads, table.capture_b.bads),
        ("goods", table.capture_a.goods, table.capture_b.goods),
        ("swapped in", table.swapped_in, ""),
        ("swapped out", table.swapped_out, ""),
    ]


def swap_set_text(table: SwapSetTable, name_a: str = "A", name_b: str = "B") -> str:
    """Aligned plain-text rendering of a swap-set table."""
    rows = [[str(c) for c in row] for row in swap_set_rows(table, name_a, name_b)]
    widths = [max(len(row[i]) for row in rows) for i in range(3)]
    lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ScoreBin:
    bin: int  # 1 = worst scores
    score_min: float
    score_max: float
    goods: int
    bads: int

    @property
    def bad_rate(self) -> float:
        total = self.goods + self.bads
        return self.bads / total if total else float("nan")


def score_distribution(scores, labels, n_bins: int, higher_is_riskier: bool = False) -> list:
    """Equal-count score bins with per-bin class mix; bin sizes differ by <= 1.

    Bin 1 holds the riskiest scores. Tied scores are ordered by row index, so
    the binning is deterministic.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    n = len(scores)
    if n_bins < 1 or n_bins > n:
        raise InvalidBinCount(f"n_bins must be in [1, {n}], got {n_bins}")
    keyed = -scores if higher_is_riskier else scores
    order = np.argsort(keyed, kind="stable")
    chunks = np.array_split(order, n_bins)
    out = []
    for b, idx in enumerate(chunks, start=1):
        out.append(
            ScoreBin(
                bin=b,
                score_min=float(scores[idx].min()),
                score_max=float(scores[idx].max()),
                goods=int(np.sum(labels[idx] == 0)),
                bads=int(np.sum(labels[idx] == 1)),
            )
        )
    return out
