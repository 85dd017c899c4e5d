"""Two-stage cascade for suicide-risk text classification.

Pipeline commands (``extract``, ``train``, ``route_datasets``, ``evaluate``,
``sweep_thresholds``) take a config path and return ``(exit_code, stdout, stderr)``.
"""

from ._core import (
    Error,
    cross_domain_gap,
    evaluate,
    extract,
    feature_names,
    features,
    is_feasible,
    llm_vote,
    metrics,
    ml_vote,
    optimize_weights,
    predict_proba,
    project_to_capped_simplex,
    route,
    route_datasets,
    sweep_thresholds,
    token_length,
    train,
    train_model,
)

__all__ = [
    "Error",
    "cross_domain_gap",
    "evaluate",
    "extract",
    "feature_names",
    "features",
    "is_feasible",
    "llm_vote",
    "metrics",
    "ml_vote",
    "optimize_weights",
    "predict_proba",
    "project_to_capped_simplex",
    "route",
    "route_datasets",
    "sweep_thresholds",
    "token_length",
    "train",
    "train_model",
]
__version__ = "0.1.0"
