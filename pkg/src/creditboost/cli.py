"""Batch command-line surface: train, evaluate, predict, explain, cv, swapset.

A TOML config file describes the run; command-line flags override config
keys. Outputs land in a fixed layout under the output directory:
model.json, metrics/, curves/, explain/, reports/. All outputs are
deterministic given the config, data and seed.

Exit codes: 0 success, 1 on any toolkit error, 2 on config parse failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import explain as explain_mod
from . import metrics as metrics_mod
from . import reports as reports_mod
from . import validation
from .booster import TrainConfig, feature_importance, load_model, predict_margin, predict_proba, save_model, train
from .dataset import ColumnSchema, Dataset, load_csv
from .encoding import export_mapping
from .errors import CreditBoostError
from .sampling import ReweightSpec, SmoteConfig, reweight, smote


class ConfigError(Exception):
    """Config file cannot be parsed or is structurally invalid (exit code 2)."""


@dataclass
class RunConfig:
    train_path: str = ""
    oot_path: str = ""
    columns: list = field(default_factory=list)
    missing_markers: list = field(default_factory=lambda: ["", "NA", "NaN", "null"])
    label_positive: str = "1"
    delimiter: str = ","
    train_cfg: TrainConfig = field(default_factory=TrainConfig)
    watch: bool = False
    sampling_mode: str = "none"
    reweight_spec: ReweightSpec = None
    smote_cfg: SmoteConfig = None
    cv_k: int = 5
    cv_metric: str = "log_loss"
    cv_threshold: float = 0.5
    cv_beta: float = 1.0
    grid: list = field(default_factory=list)
    background_size: int = 100
    explain_rows: str = "0:10"
    dependence_feature: str = ""
    color_feature: str = ""
    cutoffs: list = field(default_factory=lambda: [10.0, 20.0])
    bins: int = 10
    higher_is_riskier: bool = False
    threshold: float = 0.5
    beta: float = 1.0
    output_dir: str = "out"
    seed: int = 0


def _schema_from_config(raw_columns) -> list:
    cols = []
    for c in raw_columns:
        try:
            cols.append(ColumnSchema(name=c["name"], kind=c["kind"], role=c.get("role", "feature")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad column entry {c!r}: {exc}") from None
    return cols


def load_run_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None

    rc = RunConfig()
    try:
        rc.output_dir = raw.get("output_dir", rc.output_dir)
        rc.seed = int(raw.get("seed", rc.seed))

        data = raw.get("data", {})
        rc.train_path = data.get("train", rc.train_path)
        rc.oot_path = data.get("oot", rc.oot_path)
        rc.columns = _schema_from_config(data.get("columns", []))
        rc.missing_markers = list(data.get("missing_markers", rc.missing_markers))
        rc.label_positive = str(data.get("label_positive", rc.label_positive))
        rc.delimiter = data.get("delimiter", rc.delimiter)

        tr = dict(raw.get("train", {}))
        rc.watch = bool(tr.pop("watch", False))
        if "seed" not in tr:
            tr["seed"] = rc.seed
        rc.train_cfg = TrainConfig.from_dict(tr)

        sampling = raw.get("sampling", {})
        rc.sampling_mode = sampling.get("mode", "none")
        if rc.sampling_mode not in ("none", "reweight", "smote"):
            raise ConfigError(f"sampling mode must be none|reweight|smote, got {rc.sampling_mode!r}")
        if rc.sampling_mode == "reweight":
            rc.reweight_spec = ReweightSpec(
                target_prior=tuple(sampling["target_prior"]),
                target_cost=tuple(sampling.get("target_cost", (1.0, 1.0))),
            )
        if rc.sampling_mode == "smote":
            rc.smote_cfg = SmoteConfig(
                k_neighbors=int(sampling.get("k_neighbors", 5)),
                target_ratio=float(sampling.get("target_ratio", 1.0)),
                seed=int(sampling.get("seed", rc.seed)),
            )

        cv = raw.get("cv", {})
        rc.cv_k = int(cv.get("k", rc.cv_k))
        rc.cv_metric = cv.get("metric", rc.cv_metric)
        rc.cv_threshold = float(cv.get("threshold", rc.cv_threshold))
        rc.cv_beta = float(cv.get("beta", rc.cv_beta))
        rc.grid = list(cv.get("grid", []))

        ex = raw.get("explain", {})
        rc.background_size = int(ex.get("background_size", rc.background_size))
        rc.explain_rows = str(ex.get("rows", rc.explain_rows))
        rc.dependence_feature = ex.get("dependence_feature", "")
        rc.color_feature = ex.get("color_feature", "")

        rep = raw.get("report", {})
        rc.cutoffs = [float(c) for c in rep.get("cutoffs", rc.cutoffs)]
        rc.bins = int(rep.get("bins", rc.bins))
        rc.higher_is_riskier = bool(rep.get("higher_is_riskier", rc.higher_is_riskier))
        rc.threshold = float(rep.get("threshold", rc.threshold))
        rc.beta = float(rep.get("beta", rc.beta))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from None
    return rc


def _load_dataset(rc: RunConfig, path) -> Dataset:
    if not rc.columns:
        raise ConfigError("config declares no data.columns")
    return load_csv(
        path,
        rc.columns,
        missing_markers=set(rc.missing_markers),
        label_positive=rc.label_positive,
        delimiter=rc.delimiter,
    )


def _apply_sampling(rc: RunConfig, d: Dataset) -> Dataset:
    if rc.sampling_mode == "reweight":
        return d.with_weights(reweight(d.labels, rc.reweight_spec))
    if rc.sampling_mode == "smote":
        return smote(d, rc.smote_cfg)
    return d


def _out_dirs(rc: RunConfig) -> Path:
    out = Path(rc.output_dir)
    for sub in ("metrics", "curves", "explain", "reports"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def parse_row_selector(text: str, n_rows: int) -> list:
    """Row selector: comma-separated indices and half-open a:b ranges."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            out.extend(range(int(lo or 0), min(int(hi) if hi else n_rows, n_rows)))
        else:
            i = int(part)
            if i < 0 or i >= n_rows:
                raise ConfigError(f"row {i} out of range 0..{n_rows - 1}")
            out.append(i)
    return out


def cmd_train(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    d = _load_dataset(rc, rc.train_path)
    d = _apply_sampling(rc, d)
    watch = None
    if rc.watch:
        folds = validation.FoldAssignment.stratified(d.labels, rc.cv_k, rc.seed)
        watch = d.take(folds.fold_rows(1))
        d = d.take(folds.rest_rows(1))
    model = train(d, rc.train_cfg, watch=watch)
    save_model(model, out / "model.json")
    if watch is not None:
        rows = validation.learning_curve(model.train_history, model.watch_history)
        _write_csv(out / "curves" / "training_curve.csv", ("round", "train_loss", "validation_loss"), rows)
    else:
        rows = [(i + 1, v) for i, v in enumerate(model.train_history)]
        _write_csv(out / "curves" / "training_curve.csv", ("round", "train_loss"), rows)
    _write_csv(
        out / "metrics" / "feature_importance.csv",
        ("feature", "total_gain", "split_count"),
        feature_importance(model),
    )
    for name, wm in sorted(model.woe_maps.items()):
        _write_csv(
            out / "metrics" / f"woe_{name}.csv",
            ("category", "goods", "bads", "woe"),
            [("" if cat is None else cat, goods, bads, woe) for cat, goods, bads, woe in export_mapping(wm)],
        )
    print(f"trained {len(model.trees)} trees -> {out / 'model.json'}")


def _eval_data(rc: RunConfig, args) -> Dataset:
    path = getattr(args, "data", None) or rc.oot_path or rc.train_path
    if not path:
        raise ConfigError("no data path: pass --data or set data.oot / data.train")
    return _load_dataset(rc, path)


def cmd_evaluate(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    model = load_model(args.model or out / "model.json")
    d = _eval_data(rc, args)
    probs = predict_proba(model, d)
    report = metrics_mod.evaluate(d.labels, probs, threshold=rc.threshold, beta=rc.beta, n_bins=rc.bins)
    _write_json(out / "metrics" / "eval_report.json", metrics_mod.report_to_dict(report))
    _write_csv(out / "curves" / "roc.csv", ("fpr", "tpr"), report.roc_curve.points)
    _write_csv(out / "curves" / "pr.csv", ("recall", "precision"), report.pr_curve.points)
    thresholds, cdf_good, cdf_bad = metrics_mod.class_cdfs(d.labels, probs)
    _write_csv(
        out / "curves" / "ks.csv",
        ("threshold", "cdf_good", "cdf_bad", "gap"),
        zip(thresholds, cdf_good, cdf_bad, np.abs(cdf_bad - cdf_good)),
    )
    _write_csv(
        out / "curves" / "reliability.csv",
        ("bin_center", "mean_predicted", "observed_rate", "count"),
        [(b.center, b.mean_predicted, b.observed_rate, b.count) for b in report.reliability],
    )
    dist = reports_mod.score_distribution(probs, d.labels, rc.bins, higher_is_riskier=True)
    _write_csv(
        out / "curves" / "score_distribution.csv",
        ("bin", "score_min", "score_max", "goods", "bads", "bad_rate"),
        [(b.bin, b.score_min, b.score_max, b.goods, b.bads, b.bad_rate) for b in dist],
    )
    print(f"ks={report.ks:.2f} roc_auc={report.roc_auc:.4f} pr_auc={report.pr_auc:.4f} log_loss={report.log_loss:.4f}")


def cmd_predict(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    model = load_model(args.model or out / "model.json")
    d = _eval_data(rc, args)
    margins = predict_margin(model, d)
    probs = predict_proba(model, d)
    _write_csv(
        out / "predictions.csv",
        ("row", "margin", "probability"),
        [(i, float(m), float(p)) for i, (m, p) in enumerate(zip(margins, probs))],
    )
    print(f"wrote {len(margins)} predictions -> {out / 'predictions.csv'}")


def cmd_explain(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    model = load_model(args.model or out / "model.json")
    d = _eval_data(rc, args)
    train_d = _load_dataset(rc, rc.train_path) if rc.train_path else d
    bg = explain_mod.BackgroundSet.from_dataset(model, train_d, size=rc.background_size, seed=rc.seed)
    rows = parse_row_selector(args.rows or rc.explain_rows, d.row_count)
    attributions = explain_mod.explain_rows(model, d, rows, bg)

    per_row = []
    meta = []
    force_rows = []
    for row_id, attr in zip(rows, attributions):
        for name, value, phi in zip(attr.feature_names, attr.row, attr.phi):
            per_row.append((row_id, name, float(value), float(phi)))
        meta.append({"row": row_id, "base_value": attr.phi0, "output_value": attr.output})
        force = explain_mod.force_data(attr)
        for order, (name, phi, direction) in enumerate(force["pushes"], start=1):
            force_rows.append((row_id, order, name, phi, direction))
    _write_csv(out / "explain" / "attributions.csv", ("row", "feature", "value", "phi"), per_row)
    _write_json(out / "explain" / "attribution_meta.json", {"rows": meta})
    _write_csv(out / "explain" / "force.csv", ("row", "order", "feature", "phi", "direction"), force_rows)

    summary = explain_mod.summary_data(attributions)
    _write_csv(
        out / "explain" / "summary.csv",
        ("rank", "feature", "mean_abs_phi"),
        [(rank, s.feature, s.mean_abs_phi) for rank, s in enumerate(summary, start=1)],
    )
    dep_feature = rc.dependence_feature or (summary[0].feature if summary else "")
    color_feature = rc.color_feature or (summary[1].feature if len(summary) > 1 else dep_feature)
    if dep_feature:
        dep = explain_mod.dependence_data(attributions, dep_feature, color_feature)
        _write_csv(
            out / "explain" / "dependence.csv",
            (f"{dep_feature}", f"phi_{dep_feature}", f"{color_feature}"),
            dep,
        )
    print(f"explained {len(rows)} rows -> {out / 'explain'}")


def cmd_cv(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    d = _load_dataset(rc, rc.train_path)
    d = _apply_sampling(rc, d)
    if rc.grid:
        try:
            grid = [TrainConfig.from_dict({**rc.train_cfg.to_dict(), **entry}) for entry in rc.grid]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid entry: {exc}") from None
        best, cv_reports = validation.grid_search(
            d, grid, rc.cv_k, metric=rc.cv_metric, seed=rc.seed,
            threshold=rc.cv_threshold, beta=rc.cv_beta,
        )
        report = cv_reports[grid.index(best)]
    else:
        best = rc.train_cfg
        report = validation.kfold_cv(
            d, best, rc.cv_k, metric=rc.cv_metric, seed=rc.seed,
            threshold=rc.cv_threshold, beta=rc.cv_beta,
        )
    _write_csv(out / "metrics" / "cv_folds.csv", ("fold", rc.cv_metric), report.fold_rows_csv())
    _write_csv(
        out / "curves" / "cv_curves.csv",
        ("fold", "round", "train_loss", "validation_loss"),
        report.curve_rows_csv(),
    )
    _write_json(
        out / "metrics" / "best_config.json",
        {"config": best.to_dict(), "metric": rc.cv_metric, "mean": report.mean,
         "std": report.std, "cv_estimate": report.cv_estimate},
    )
    print(f"cv {rc.cv_metric}: mean={report.mean:.6f} std={report.std:.6f}")


def _read_column(path, column: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if column not in header:
            raise ConfigError(f"{path}: no column {column!r}")
        j = header.index(column)
        return np.array([float(row[j]) for row in reader])


def cmd_swapset(rc: RunConfig, args) -> None:
    out = _out_dirs(rc)
    scores_a = _read_column(args.scores_a, args.score_column)
    scores_b = _read_column(args.scores_b, args.score_column)
    labels = _read_column(args.labels, args.label_column).astype(int)
    for pct in rc.cutoffs:
        table = reports_mod.swap_set(
            scores_a, scores_b, labels, pct, higher_is_riskier=rc.higher_is_riskier
        )
        stem = f"swapset_{pct:g}"
        _write_csv(out / "reports" / f"{stem}.csv", ("metric", "model_a", "model_b"),
                   reports_mod.swap_set_rows(table)[1:])
        (out / "reports" / f"{stem}.txt").write_text(reports_mod.swap_set_text(table), encoding="utf-8")
        print(
            f"worst {pct:g}%: A bads={table.capture_a.bads} B bads={table.capture_b.bads} "
            f"swapped_in={table.swapped_in} swapped_out={table.swapped_out}"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="creditboost", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML run config")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="global seed (overrides config)")
        p.set_defaults(func=func)
        return p

    add("train", cmd_train, "fit a model and write model.json plus training curves")
    p = add("evaluate", cmd_evaluate, "score data and write metric report plus curve CSVs")
    p.add_argument("--model", help="model file (default: <out>/model.json)")
    p.add_argument("--data", help="CSV to evaluate (default: data.oot, then data.train)")
    p.add_argument("--threshold", type=float, help="classification cutoff for the confusion matrix")
    p = add("predict", cmd_predict, "write per-row margin and probability")
    p.add_argument("--model", help="model file (default: <out>/model.json)")
    p.add_argument("--data", help="CSV to score (default: data.oot, then data.train)")
    p = add("explain", cmd_explain, "exact per-row attributions plus summary data")
    p.add_argument("--model", help="model file (default: <out>/model.json)")
    p.add_argument("--data", help="CSV with rows to explain (default: data.oot, then data.train)")
    p.add_argument("--rows", help="row selector, e.g. 0:100 or 3,7,9")
    add("cv", cmd_cv, "k-fold cross-validation, optionally over a config grid")
    p = add("swapset", cmd_swapset, "compare two score files at the configured cutoffs")
    p.add_argument("--scores-a", required=True, help="CSV with challenger scores")
    p.add_argument("--scores-b", required=True, help="CSV with incumbent scores")
    p.add_argument("--labels", required=True, help="CSV with 0/1 labels (1 = Bad)")
    p.add_argument("--score-column", default="score")
    p.add_argument("--label-column", default="label")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = load_run_config(args.config)
        if args.out:
            rc.output_dir = args.out
        if args.seed is not None:
            rc.seed = args.seed
            rc.train_cfg = TrainConfig.from_dict({**rc.train_cfg.to_dict(), "seed": args.seed})
        if getattr(args, "threshold", None) is not None:
            rc.threshold = args.threshold
        args.func(rc, args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except CreditBoostError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
