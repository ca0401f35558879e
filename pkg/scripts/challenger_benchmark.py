#!/usr/bin/env python3
"""Challenger-vs-baseline benchmark on the synthetic portfolio.

Trains the boosted challenger and a single-stump baseline on the in-time
window, scores the out-of-time window, and prints AUROC/KS/PR for both plus
a swap-set table at the requested cutoff.

Usage:
    python scripts/challenger_benchmark.py --rows 50000 --seed 20260809
"""
import argparse
import time

from creditboost.booster import TrainConfig, predict_proba, train
from creditboost.dataset import temporal_split
from creditboost.metrics import ks_statistic, log_loss, pr_curve, roc_curve
from creditboost.reports import swap_set, swap_set_text
from creditboost.synthetic import synthetic_portfolio


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=50_000)
    parser.add_argument("--bad-rate", type=float, default=0.05)
    parser.add_argument("--seed", type=int, default=20260809)
    parser.add_argument("--cutoff-month", type=float, default=29.0)
    parser.add_argument("--swap-cutoff", type=float, default=10.0, help="worst-%% for the swap set")
    args = parser.parse_args()

    started = time.perf_counter()
    portfolio = synthetic_portfolio(n_rows=args.rows, bad_rate=args.bad_rate, seed=args.seed)
    in_time, oot = temporal_split(portfolio, "app_month", args.cutoff_month)
    print(f"in-time {in_time.row_count} rows, oot {oot.row_count} rows "
          f"(bad rates {in_time.labels.mean():.4f} / {oot.labels.mean():.4f})")

    challenger = train(in_time, TrainConfig(
        n_rounds=60, max_depth=4, learning_rate=0.2, min_child_weight=2.0, seed=5,
    ))
    baseline = train(in_time, TrainConfig(n_rounds=1, max_depth=1, learning_rate=1.0, seed=5))

    for name, model in (("challenger", challenger), ("stump baseline", baseline)):
        probs = predict_proba(model, oot)
        print(
            f"{name:>15}: AUROC {roc_curve(oot.labels, probs).area:.4f}  "
            f"KS {ks_statistic(oot.labels, probs)[0]:.2f}  "
            f"PR {pr_curve(oot.labels, probs).area:.4f}  "
            f"log-loss {log_loss(oot.labels, probs):.4f}"
        )

    table = swap_set(
        predict_proba(challenger, oot),
        predict_proba(baseline, oot),
        oot.labels,
        args.swap_cutoff,
        higher_is_riskier=True,
    )
    print()
    print(swap_set_text(table, name_a="challenger", name_b="baseline"))
    print(f"total time {time.perf_counter() - started:.1f}s")


if __name__ == "__main__":
    main()
