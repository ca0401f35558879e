#!/usr/bin/env python3
"""Monte-Carlo check of the finite-dictionary excess-risk bound.

For each trial, n labeled samples are drawn from a known discrete world, the
empirical-risk minimizer is picked among M fixed random classifiers, and the
trial counts as covered when that pick's true risk stays within
sqrt((2/n) ln(2M/delta)) of the best true risk. Coverage should come out
at 1 - delta or (far) above, since the bound is loose.

Usage:
    python scripts/hoeffding_coverage.py --n 500 --classifiers 20 --delta 0.1
"""
import argparse

from creditboost.validation import coverage_experiment, hoeffding_bound


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=500, help="samples per trial")
    parser.add_argument("--classifiers", type=int, default=20, help="dictionary size M")
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    bound = hoeffding_bound(args.n, args.classifiers, args.delta)
    coverage = coverage_experiment(
        n=args.n, M=args.classifiers, delta=args.delta, n_trials=args.trials, seed=args.seed
    )
    print(f"bound value: {bound:.4f}")
    print(f"coverage:    {coverage:.3f} over {args.trials} trials (target >= {1 - args.delta:.2f})")


if __name__ == "__main__":
    main()
