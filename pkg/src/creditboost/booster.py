"""Second-order gradient-boosted trees for binary logistic loss.

Each round fits one regression tree to the current gradient/hessian pairs by
exact greedy split search (candidate thresholds at midpoints of consecutive
distinct present values), with both missing-routing directions evaluated at
every candidate and the better kept. Leaf values are the closed-form
regularized Newton step; `max_delta_step` clamps the raw leaf value before
the learning rate is applied.

Determinism: one seeded generator drives all sampling, in a fixed draw order
per round (rows, then tree columns, then per-level columns), so identical
data and config produce identical model bytes.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping, NamedTuple, Optional

import numpy as np
from scipy.special import expit, logit

from .dataset import Dataset
from .encoding import apply_woe, fit_woe, woe_map_from_rows
from .errors import (
    CorruptModelFile,
    MissingColumn,
    NonNumericFeature,
    SingleClassDataset,
    UnknownFeature,
    VersionMismatch,
)

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Booster hyperparameters. `lambda_`/`alpha` are the L2/L1 penalties on
    leaf weights, `gamma` the minimum split gain, `max_delta_step` the
    absolute cap on raw leaf values (0 disables)."""

    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    lambda_: float = 1.0
    alpha: float = 0.0
    gamma: float = 0.0
    min_child_weight: float = 1.0
    max_delta_step: float = 0.0
    scale_pos_weight: float = 1.0
    subsample: float = 1.0
    colsample_bytree: float = 1.0
    colsample_bylevel: float = 1.0
    base_score: float = 0.5
    seed: int = 0

    def __post_init__(self):
        checks = [
            (self.n_rounds >= 0, "n_rounds must be >= 0"),
            (0 < self.learning_rate <= 1, "learning_rate must be in (0,1]"),
            (self.max_depth >= 1, "max_depth must be >= 1"),
            (self.lambda_ >= 0, "lambda_ must be >= 0"),
            (self.alpha >= 0, "alpha must be >= 0"),
            (self.gamma >= 0, "gamma must be >= 0"),
            (self.min_child_weight >= 0, "min_child_weight must be >= 0"),
            (self.max_delta_step >= 0, "max_delta_step must be >= 0"),
            (self.scale_pos_weight > 0, "scale_pos_weight must be > 0"),
            (0 < self.subsample <= 1, "subsample must be in (0,1]"),
            (0 < self.colsample_bytree <= 1, "colsample_bytree must be in (0,1]"),
            (0 < self.colsample_bylevel <= 1, "colsample_bylevel must be in (0,1]"),
            (0 < self.base_score < 1, "base_score must be in (0,1)"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lambda_")
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrainConfig":
        data = dict(data)
        if "lambda" in data:
            data["lambda_"] = data.pop("lambda")
        return cls(**data)


class GradientPair(NamedTuple):
    g: float  # first derivative of the loss wrt the margin
    h: float  # second derivative, >= 0


class SplitCandidate(NamedTuple):
    feature: int
    threshold: float
    default_left: bool
    gain: float


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature >= 0) or leaf (feature == -1, raw value in `leaf`)."""

    feature: int = -1
    threshold: float = 0.0
    default_left: bool = True
    left: int = -1
    right: int = -1
    gain: float = 0.0
    leaf: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class Tree:
    nodes: tuple  # of TreeNode; node 0 is the root, children ids in preorder


@dataclass(frozen=True)
class BoostedModel:
    """Ordered trees plus base score and fitted encoders; the scoring artifact.

    Leaf values are stored raw (pre learning-rate); traversal applies the
    configured learning rate, so the margin is
    base_margin + learning_rate * sum of leaf values.
    """

    config: TrainConfig
    feature_names: tuple
    feature_kinds: tuple  # "numeric" | "categorical", aligned with feature_names
    woe_maps: dict  # categorical feature name -> WoeMap
    base_score: float
    trees: tuple  # of Tree
    train_history: tuple = ()  # weighted training log-loss after each round
    watch_history: tuple = ()  # unweighted log-loss on the watch set, if any

    @property
    def base_margin(self) -> float:
        return float(logit(self.base_score))

    def predict_margin(self, rows):
        return predict_margin(self, rows)

    def predict_proba(self, rows):
        return predict_proba(self, rows)


def logistic_grad(label, margin, weight=1.0) -> GradientPair:
    """Gradient/hessian of weighted logistic loss at the given margin."""
    p = expit(np.asarray(margin, dtype=float))
    g = (p - np.asarray(label)) * weight
    h = p * (1.0 - p) * weight
    if np.ndim(label) == 0 and np.ndim(margin) == 0:
        return GradientPair(float(g), float(h))
    return GradientPair(g, h)


def _soft_threshold(x: float, a: float) -> float:
    return np.sign(x) * max(abs(x) - a, 0.0)


def leaf_weight(g_sum: float, h_sum: float, cfg: TrainConfig) -> float:
    """Raw regularized Newton leaf value -soft_threshold(G, alpha)/(H + lambda),
    clamped to +-max_delta_step when the cap is on. The learning rate is the
    caller's business."""
    denom = h_sum + cfg.lambda_
    if denom <= 0.0:
        return 0.0
    w = -_soft_threshold(g_sum, cfg.alpha) / denom
    if cfg.max_delta_step > 0:
        w = float(np.clip(w, -cfg.max_delta_step, cfg.max_delta_step))
    return float(w)


def find_best_split(X, g, h, rows, features, cfg: TrainConfig) -> Optional[SplitCandidate]:
    """Exact greedy search over the node's rows and the given feature pool.

    Candidate thresholds are midpoints of consecutive distinct present
    values; for each, both missing-routing directions are tried. Gain is the
    second-order split gain minus gamma; candidates need gain > 0 and both
    children's hessian mass >= min_child_weight. Ties break on lower feature
    index, then smaller threshold, then default-left.
    """
    rows = np.asarray(rows)
    g_node = g[rows]
    h_node = h[rows]
    g_tot = float(g_node.sum())
    h_tot = float(h_node.sum())
    lam = cfg.lambda_
    parent_score = g_tot * g_tot / (h_tot + lam) if h_tot + lam > 0 else 0.0

    best: Optional[SplitCandidate] = None
    for f in sorted(int(f) for f in features):
        v = X[rows, f]
        present = ~np.isnan(v)
        if present.sum() < 2:
            continue
        order = np.argsort(v[present], kind="stable")
        vs = v[present][order]
        gs = g_node[present][order]
        hs = h_node[present][order]
        cut = np.flatnonzero(vs[:-1] != vs[1:])
        if cut.size == 0:
            continue
        thresholds = (vs[cut] + vs[cut + 1]) / 2.0
        gl_present = np.cumsum(gs)[cut]
        hl_present = np.cumsum(hs)[cut]
        # summed over the missing rows themselves: exactly 0.0 when none, so
        # the two routing directions tie exactly and default-left wins
        g_miss = float(g_node[~present].sum())
        h_miss = float(h_node[~present].sum())

        def gains(gl, hl):
            gr = g_tot - gl
            hr = h_tot - hl
            with np.errstate(divide="ignore", invalid="ignore"):
                raw = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_score) - cfg.gamma
            valid = (hl >= cfg.min_child_weight) & (hr >= cfg.min_child_weight) & np.isfinite(raw)
            return np.where(valid, raw, -np.inf)

        gain_left = gains(gl_present + g_miss, hl_present + h_miss)
        gain_right = gains(gl_present, hl_present)
        use_left = gain_left >= gain_right  # same threshold: prefer default-left
        gain_best = np.where(use_left, gain_left, gain_right)
        i = int(np.argmax(gain_best))  # first max: smaller threshold wins ties
        if gain_best[i] > 0.0 and (best is None or gain_best[i] > best.gain):
            best = SplitCandidate(
                feature=f,
                threshold=float(thresholds[i]),
                default_left=bool(use_left[i]),
                gain=float(gain_best[i]),
            )
    return best


def _grow_tree(X, g, h, rows, cols_by_level, cfg: TrainConfig) -> Tree:
    nodes = []

    def build(node_rows, depth):
        nid = len(nodes)
        nodes.append(None)
        cand = None
        if depth < cfg.max_depth:
            cand = find_best_split(X, g, h, node_rows, cols_by_level[depth], cfg)
        if cand is None:
            w = leaf_weight(float(g[node_rows].sum()), float(h[node_rows].sum()), cfg)
            nodes[nid] = TreeNode(leaf=w)
        else:
            v = X[node_rows, cand.feature]
            go_left = np.where(np.isnan(v), cand.default_left, v < cand.threshold)
            left_id = build(node_rows[go_left], depth + 1)
            right_id = build(node_rows[~go_left], depth + 1)
            nodes[nid] = TreeNode(
                feature=cand.feature,
                threshold=cand.threshold,
                default_left=cand.default_left,
                left=left_id,
                right=right_id,
                gain=cand.gain,
            )
        return nid

    build(np.asarray(rows), 0)
    return Tree(tuple(nodes))


def _tree_leaf_values(tree: Tree, X) -> np.ndarray:
    """Raw leaf value reached by every row; rows with missing values follow
    each node's default direction. Total: every row lands in exactly one leaf."""
    out = np.empty(len(X))
    stack = [(0, np.arange(len(X)))]
    while stack:
        nid, idx = stack.pop()
        node = tree.nodes[nid]
        if node.is_leaf:
            out[idx] = node.leaf
            continue
        v = X[idx, node.feature]
        go_left = np.where(np.isnan(v), node.default_left, v < node.threshold)
        stack.append((node.left, idx[go_left]))
        stack.append((node.right, idx[~go_left]))
    return out


def _round_count(fraction: float, n: int) -> int:
    return max(1, int(np.floor(fraction * n + 0.5)))


def _design_matrix(d: Dataset, feature_names, feature_kinds, woe_maps) -> np.ndarray:
    cols = []
    for name, kind in zip(feature_names, feature_kinds):
        col = d.column(name)  # raises MissingColumn
        if kind == "categorical":
            if col.kind != "categorical":
                raise NonNumericFeature(f"feature {name!r}: model expects categorical, data is {col.kind}")
            cols.append(apply_woe(woe_maps[name], col))
        else:
            if col.kind != "numeric":
                raise NonNumericFeature(f"feature {name!r}: model expects numeric, data is {col.kind}")
            values = col.values.astype(float).copy()
            values[col.missing] = np.nan
            cols.append(values)
    return np.column_stack(cols) if cols else np.empty((d.row_count, 0))


def encode_features(m: "BoostedModel", d: Dataset) -> np.ndarray:
    """Numeric design matrix for the model's features (NaN marks missing)."""
    try:
        return _design_matrix(d, m.feature_names, m.feature_kinds, m.woe_maps)
    except MissingColumn as exc:
        raise UnknownFeature(str(exc)) from None


def margins_for_matrix(m: "BoostedModel", X) -> np.ndarray:
    """Margin for encoded rows: base margin plus learning-rate-scaled leaves."""
    margins = np.full(len(X), m.base_margin)
    for tree in m.trees:
        margins += m.config.learning_rate * _tree_leaf_values(tree, X)
    return margins


def _row_to_matrix(m: "BoostedModel", row: Mapping) -> np.ndarray:
    values = np.empty((1, len(m.feature_names)))
    for j, (name, kind) in enumerate(zip(m.feature_names, m.feature_kinds)):
        if name not in row:
            raise UnknownFeature(f"row lacks feature {name!r}")
        cell = row[name]
        if kind == "categorical":
            values[0, j] = m.woe_maps[name].woe(cell)
        else:
            values[0, j] = np.nan if cell is None else float(cell)
    return values


def predict_margin(m: BoostedModel, rows):
    """Raw additive output on the log-odds scale. `rows` may be a Dataset
    (returns an array) or a mapping of feature name to value (returns a float;
    None means missing)."""
    if isinstance(rows, Dataset):
        return margins_for_matrix(m, encode_features(m, rows))
    if isinstance(rows, Mapping):
        return float(margins_for_matrix(m, _row_to_matrix(m, rows))[0])
    return margins_for_matrix(m, np.asarray(rows, dtype=float))


def predict_proba(m: BoostedModel, rows):
    return expit(predict_margin(m, rows))


def train(d: Dataset, cfg: TrainConfig, watch: Optional[Dataset] = None) -> BoostedModel:
    """Fit `cfg.n_rounds` trees by forward stagewise boosting.

    Categorical features are WOE-encoded first (encoders are kept on the
    model). `scale_pos_weight` multiplies the gradient statistics of Bad
    rows. The recorded per-round training loss is the weighted log-loss the
    booster actually minimizes; the optional `watch` dataset is scored with
    plain unweighted log-loss after each round.
    """
    labels = d.labels
    if len(np.unique(labels)) < 2:
        raise SingleClassDataset("training data must contain both classes")

    feature_names = tuple(c.name for c in d.columns)
    feature_kinds = tuple(c.kind for c in d.columns)
    woe_maps = {c.name: fit_woe(d, c.name) for c in d.columns if c.kind == "categorical"}
    X = _design_matrix(d, feature_names, feature_kinds, woe_maps)
    n, p = X.shape
    if p == 0:
        raise NonNumericFeature("no feature columns")

    y = labels.astype(float)
    w_eff = d.weights * np.where(labels == 1, cfg.scale_pos_weight, 1.0)
    w_sum = float(w_eff.sum())
    base_margin = float(logit(cfg.base_score))
    margins = np.full(n, base_margin)
    watch_X = None
    if watch is not None:
        watch_X = _design_matrix(watch, feature_names, feature_kinds, woe_maps)
        watch_margins = np.full(len(watch_X), base_margin)

    rng = np.random.default_rng(cfg.seed)
    trees = []
    train_history = []
    watch_history = []
    for _ in range(cfg.n_rounds):
        g, h = logistic_grad(y, margins, w_eff)

        if cfg.subsample < 1.0:
            rows = np.sort(rng.choice(n, size=_round_count(cfg.subsample, n), replace=False))
        else:
            rows = np.arange(n)
        if cfg.colsample_bytree < 1.0:
            tree_cols = np.sort(rng.choice(p, size=_round_count(cfg.colsample_bytree, p), replace=False))
        else:
            tree_cols = np.arange(p)
        if cfg.colsample_bylevel < 1.0:
            size = _round_count(cfg.colsample_bylevel, len(tree_cols))
            cols_by_level = [
                np.sort(rng.choice(tree_cols, size=size, replace=False)) for _ in range(cfg.max_depth)
            ]
        else:
            cols_by_level = [tree_cols] * cfg.max_depth

        tree = _grow_tree(X, g, h, rows, cols_by_level, cfg)
        trees.append(tree)
        margins += cfg.learning_rate * _tree_leaf_values(tree, X)

        prob = np.clip(expit(margins), 1e-15, 1 - 1e-15)
        losses = -(y * np.log(prob) + (1 - y) * np.log(1 - prob))
        train_history.append(float(np.sum(w_eff * losses) / w_sum))
        if watch_X is not None:
            watch_margins += cfg.learning_rate * _tree_leaf_values(tree, watch_X)
            wp = np.clip(expit(watch_margins), 1e-15, 1 - 1e-15)
            wy = watch.labels.astype(float)
            watch_history.append(float(-np.mean(wy * np.log(wp) + (1 - wy) * np.log(1 - wp))))

    return BoostedModel(
        config=cfg,
        feature_names=feature_names,
        feature_kinds=feature_kinds,
        woe_maps=woe_maps,
        base_score=cfg.base_score,
        trees=tuple(trees),
        train_history=tuple(train_history),
        watch_history=tuple(watch_history),
    )


def feature_importance(m: BoostedModel) -> list:
    """Per-feature (name, total split gain, split count), gain-descending."""
    gains = np.zeros(len(m.feature_names))
    counts = np.zeros(len(m.feature_names), dtype=int)
    for tree in m.trees:
        for node in tree.nodes:
            if not node.is_leaf:
                gains[node.feature] += node.gain
                counts[node.feature] += 1
    order = sorted(range(len(gains)), key=lambda i: (-gains[i], i))
    return [(m.feature_names[i], float(gains[i]), int(counts[i])) for i in order]


def _node_to_dict(nid: int, node: TreeNode) -> dict:
    if node.is_leaf:
        return {"id": nid, "leaf": node.leaf}
    return {
        "id": nid,
        "feature": node.feature,
        "threshold": node.threshold,
        "default_left": node.default_left,
        "left": node.left,
        "right": node.right,
        "gain": node.gain,
    }


def save_model(m: BoostedModel, path) -> None:
    """Write the model as JSON: {version, config, base_score, feature_names,
    woe_maps, trees}. Feature kinds are implied by woe_maps membership."""
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "config": m.config.to_dict(),
        "base_score": m.base_score,
        "feature_names": list(m.feature_names),
        "woe_maps": {
            name: {
                "smoothing": wm.smoothing,
                "unseen_woe": wm.unseen_woe,
                "entries": [[cat, goods, bads, woe] for cat, (goods, bads, woe) in wm.entries.items()],
            }
            for name, wm in m.woe_maps.items()
        },
        "trees": [
            {"nodes": [_node_to_dict(i, node) for i, node in enumerate(tree.nodes)]} for tree in m.trees
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> BoostedModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptModelFile(f"{path}: {exc}") from None
    if not isinstance(payload, dict) or "version" not in payload:
        raise CorruptModelFile(f"{path}: missing version field")
    if payload["version"] != MODEL_FORMAT_VERSION:
        raise VersionMismatch(f"{path}: format version {payload['version']}, expected {MODEL_FORMAT_VERSION}")
    try:
        woe_maps = {
            name: woe_map_from_rows(
                name,
                [(cat, goods, bads, woe) for cat, goods, bads, woe in spec["entries"]],
                unseen_woe=spec["unseen_woe"],
                smoothing=spec["smoothing"],
            )
            for name, spec in payload["woe_maps"].items()
        }
        trees = []
        for tree_spec in payload["trees"]:
            nodes = [None] * len(tree_spec["nodes"])
            for nd in tree_spec["nodes"]:
                if "leaf" in nd:
                    nodes[nd["id"]] = TreeNode(leaf=float(nd["leaf"]))
                else:
                    nodes[nd["id"]] = TreeNode(
                        feature=int(nd["feature"]),
                        threshold=float(nd["threshold"]),
                        default_left=bool(nd["default_left"]),
                        left=int(nd["left"]),
                        right=int(nd["right"]),
                        gain=float(nd["gain"]),
                    )
            trees.append(Tree(tuple(nodes)))
        feature_names = tuple(payload["feature_names"])
        return BoostedModel(
            config=TrainConfig.from_dict(payload["config"]),
            feature_names=feature_names,
            feature_kinds=tuple("categorical" if n in woe_maps else "numeric" for n in feature_names),
            woe_maps=woe_maps,
            base_score=float(payload["base_score"]),
            trees=tuple(trees),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CorruptModelFile(f"{path}: malformed model payload ({exc})") from None
