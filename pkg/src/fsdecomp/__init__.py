"""Feature-set decomposition into strongly relevant, weakly relevant and irrelevant features."""

from .data import (
    CLASSIFICATION,
    REGRESSION,
    Dataset,
    FeatureIndexSet,
    bootstrap_rows,
    drop_feature,
    extend_with_random_shadow,
    load_csv,
    permute_feature,
    save_csv,
    select_features,
)
from .forest import Forest, ForestParams, Split, best_split, fit, forest_to_json, importance_gain, predict, score
from .stats import IntervalStatistic, NullSamples, prediction_interval, sample_null, t_quantile
from .boruta import binomial_two_sided_p, run_boruta
from .decompose import Diagnostics, PipelineConfig, RelevanceReport, decompose, minimal_set, strong_test
from .synth import (
    GroundTruth,
    LinearSpec,
    NonlinearSpec,
    gen_linear,
    gen_nonlinear,
    generate,
    preset,
)
from .bench import BenchResult, ClassMetrics, relevance_metrics, rfe_cv, run_bench

__version__ = "0.1.0"

__all__ = [
    "CLASSIFICATION",
    "REGRESSION",
    "BenchResult",
    "ClassMetrics",
    "Dataset",
    "Diagnostics",
    "FeatureIndexSet",
    "Forest",
    "ForestParams",
    "GroundTruth",
    "IntervalStatistic",
    "LinearSpec",
    "NonlinearSpec",
    "NullSamples",
    "PipelineConfig",
    "RelevanceReport",
    "Split",
    "best_split",
    "binomial_two_sided_p",
    "bootstrap_rows",
    "decompose",
    "drop_feature",
    "extend_with_random_shadow",
    "fit",
    "forest_to_json",
    "gen_linear",
    "gen_nonlinear",
    "generate",
    "importance_gain",
    "load_csv",
    "minimal_set",
    "permute_feature",
    "predict",
    "prediction_interval",
    "preset",
    "relevance_metrics",
    "rfe_cv",
    "run_bench",
    "run_boruta",
    "sample_null",
    "save_csv",
    "score",
    "select_features",
    "strong_test",
    "t_quantile",
]
