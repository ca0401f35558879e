"""Credit scoring toolkit: WOE encoding, imbalance handling, second-order
boosted trees with missing-value routing, cross-validation, imbalance-aware
metrics, exact Shapley explanations, and swap-set reporting."""

from .booster import (
    BoostedModel,
    GradientPair,
    TrainConfig,
    feature_importance,
    find_best_split,
    leaf_weight,
    load_model,
    logistic_grad,
    predict_margin,
    predict_proba,
    save_model,
    train,
)
from .dataset import (
    ColumnSchema,
    Dataset,
    load_csv,
    save_csv,
    stratified_split,
    temporal_split,
)
from .encoding import WoeMap, apply_woe, export_mapping, fit_woe, woe_map_from_rows
from .explain import (
    Attribution,
    BackgroundSet,
    coalition_value,
    dependence_data,
    explain_rows,
    force_data,
    model_scorer,
    shapley_exact,
    summary_data,
    verify_axioms,
)
from .metrics import (
    ConfusionMatrix,
    CurveData,
    EvalReport,
    confusion,
    evaluate,
    fbeta,
    ks_statistic,
    log_loss,
    pr_curve,
    precision_recall,
    reliability_curve,
    roc_curve,
)
from .reports import ScoreBin, SwapSetTable, score_distribution, swap_set
from .sampling import ReweightSpec, SmoteConfig, reweight, smote
from .synthetic import synthetic_portfolio
from .validation import (
    CvReport,
    FoldAssignment,
    grid_search,
    hoeffding_bound,
    kfold_cv,
    learning_curve,
)

__version__ = "0.1.0"
