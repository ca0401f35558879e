#!/usr/bin/env python3
"""End-to-end CLI walkthrough on a small synthetic portfolio.

Generates data, then drives every subcommand: train, evaluate, predict,
explain, cv, and a swap set comparing the trained model against a shuffled
copy of its own scores. Everything lands under --workdir.

Usage:
    python scripts/demo_pipeline.py --workdir demo_out
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from creditboost.cli import main as cli
from creditboost.dataset import save_csv, temporal_split
from creditboost.synthetic import synthetic_portfolio

CONFIG = """\
output_dir = "{work}/out"
seed = 11

[data]
train = "{work}/train.csv"
oot = "{work}/oot.csv"
label_positive = "1"
columns = [
  {{name="util", kind="numeric"}},
  {{name="dti", kind="numeric"}},
  {{name="ltv", kind="numeric"}},
  {{name="file_age", kind="numeric"}},
  {{name="inquiries", kind="numeric"}},
  {{name="income", kind="numeric"}},
  {{name="app_month", kind="numeric"}},
  {{name="region", kind="categorical"}},
  {{name="channel", kind="categorical"}},
  {{name="label", kind="categorical", role="label"}},
]

[train]
n_rounds = 40
max_depth = 3
learning_rate = 0.2
watch = true

[cv]
k = 4
metric = "log_loss"
grid = [{{learning_rate = 0.2}}, {{learning_rate = 0.05}}]

[explain]
background_size = 50
rows = "0:10"

[report]
cutoffs = [10.0, 20.0]
bins = 10
higher_is_riskier = true
"""


def run(argv):
    print(f"$ creditboost {' '.join(argv)}")
    code = cli(argv)
    if code != 0:
        raise SystemExit(code)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo_out")
    parser.add_argument("--rows", type=int, default=6000)
    args = parser.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    portfolio = synthetic_portfolio(n_rows=args.rows, bad_rate=0.07, seed=11)
    in_time, oot = temporal_split(portfolio, "app_month", 29.0)
    save_csv(in_time, work / "train.csv")
    save_csv(oot, work / "oot.csv")
    config = work / "run.toml"
    config.write_text(CONFIG.format(work=work), encoding="utf-8")

    run(["train", "--config", str(config)])
    run(["evaluate", "--config", str(config)])
    run(["predict", "--config", str(config)])
    run(["explain", "--config", str(config)])
    run(["cv", "--config", str(config)])

    # swap set: the model's own scores vs a degraded (shuffled-tail) copy
    with open(work / "out" / "predictions.csv", newline="") as fh:
        probs = np.array([float(row[2]) for row in list(csv.reader(fh))[1:]])
    rng = np.random.default_rng(0)
    degraded = probs.copy()
    tail = rng.permutation(len(probs))[: len(probs) // 2]
    degraded[tail] = rng.permutation(degraded[tail])
    for name, scores in (("scores_a.csv", probs), ("scores_b.csv", degraded)):
        with open(work / name, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["score"])
            w.writerows([[s] for s in scores])
    with open(work / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label"])
        w.writerows([[int(v)] for v in oot.labels])
    run([
        "swapset", "--config", str(config),
        "--scores-a", str(work / "scores_a.csv"),
        "--scores-b", str(work / "scores_b.csv"),
        "--labels", str(work / "labels.csv"),
    ])
    print(f"\nall outputs under {work / 'out'}")


if __name__ == "__main__":
    main()
