"""Iterative decomposition of a feature set into strong / weak / irrelevant.

Pipeline per run:

1. all-relevant set A via shadow-contrast selection (low feature fraction);
2. restrict the data to A and sample two null distributions on it: model
   scores (loss-comparison forest) and shadow importances (minimal-set
   forest), each turned into a Student-t prediction interval (score interval
   and importance interval, computed once and reused);
3. minimal set M: one high-feature-fraction fit, keep features whose gain
   importance strictly exceeds the importance interval's upper bound;
4. for each feature in M only, refit without it and flag it strongly relevant
   when the reduced training score falls below the score interval's lower
   bound (scores are higher-is-better, so "significantly worse" means below
   the lower bound);
5. weak = A minus strong, irrelevant = everything outside A.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boruta import run_boruta
from .data import CLASSIFICATION, Dataset, FeatureIndexSet, drop_feature, select_features
from .forest import ForestParams, fit, importance_gain, score
from .stats import IntervalStatistic, prediction_interval, sample_null


@dataclass(frozen=True)
class PipelineConfig:
    """Forest parameters for the three phases plus the statistical knobs."""

    n_trees: int = 100
    num_leaves: int = 32
    max_depth: int = 5
    bagging_fraction: float = 0.632
    min_samples_leaf: int = 1
    boruta_feature_fraction: float = 0.1
    minimal_feature_fraction: float = 1.0
    loss_feature_fraction: float = 0.8
    alpha: int = 50
    p_value: float = 1e-6
    boruta_max_iter: int = 100
    boruta_test_level: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.alpha < 2:
            raise ValueError("alpha must be >= 2")
        if not 0.0 < self.p_value < 1.0:
            raise ValueError("p_value must be in (0, 1)")

    def _params(self, feature_fraction: float) -> ForestParams:
        return ForestParams(
            n_trees=self.n_trees,
            feature_fraction=feature_fraction,
            num_leaves=self.num_leaves,
            max_depth=self.max_depth,
            bagging_fraction=self.bagging_fraction,
            min_samples_leaf=self.min_samples_leaf,
            seed=self.seed,
        )

    def boruta_params(self) -> ForestParams:
        return self._params(self.boruta_feature_fraction)

    def minimal_params(self) -> ForestParams:
        return self._params(self.minimal_feature_fraction)

    def loss_params(self) -> ForestParams:
        return self._params(self.loss_feature_fraction)


@dataclass(frozen=True)
class Diagnostics:
    all_relevant: FeatureIndexSet
    minimal: FeatureIndexSet
    score_interval: IntervalStatistic | None
    importance_interval: IntervalStatistic | None
    reduced_scores: dict[int, float]
    importances: dict[int, float]
    strong_tests_run: int


@dataclass(frozen=True)
class RelevanceReport:
    """Disjoint strong / weak / irrelevant index sets plus pipeline diagnostics."""

    strong: FeatureIndexSet
    weak: FeatureIndexSet
    irrelevant: FeatureIndexSet
    diagnostics: Diagnostics

    def to_json(self) -> dict:
        diag = self.diagnostics
        return {
            "strong": list(self.strong),
            "weak": list(self.weak),
            "irrelevant": list(self.irrelevant),
            "diagnostics": {
                "all_relevant": list(diag.all_relevant),
                "minimal": list(diag.minimal),
                "score_interval": _interval_json(diag.score_interval),
                "importance_interval": _interval_json(diag.importance_interval),
                "reduced_scores": {str(j): diag.reduced_scores[j] for j in sorted(diag.reduced_scores)},
                "importances": {str(j): diag.importances[j] for j in sorted(diag.importances)},
                "strong_tests_run": diag.strong_tests_run,
            },
        }


def _interval_json(iv: IntervalStatistic | None) -> dict | None:
    if iv is None:
        return None
    return {
        "mean": iv.mean,
        "sd": iv.sd,
        "n": iv.n,
        "p": iv.p,
        "lower": iv.lower,
        "upper": iv.upper,
    }


def _fit_importances(
    params: ForestParams, ds: Dataset, rng: np.random.Generator
) -> np.ndarray:
    return importance_gain(fit(params, ds, rng))


def minimal_set(
    params: ForestParams,
    ds: Dataset,
    gamma_upper: float,
    rng: np.random.Generator,
) -> FeatureIndexSet:
    """Column positions of `ds` whose gain importance strictly exceeds gamma_upper.

    `ds` is expected to be the dataset already restricted to the all-relevant
    set, and gamma_upper the upper bound of the shadow-importance interval
    sampled with the same parameters. An empty result is legal.
    """
    imps = _fit_importances(params, ds, rng)
    return FeatureIndexSet.of(np.nonzero(imps > gamma_upper)[0])


def _featureless_score(ds: Dataset) -> float:
    """Best score attainable with no features at all (constant predictor)."""
    if ds.task == CLASSIFICATION:
        frac = float(ds.y.mean())
        return max(frac, 1.0 - frac)
    med = float(np.median(ds.y))
    return float(-np.mean(np.abs(ds.y - med)))


def strong_test(
    ds_v: Dataset,
    position: int,
    score_interval: IntervalStatistic,
    params: ForestParams,
    rng: np.random.Generator,
) -> tuple[bool, float]:
    """Refit without the column at `position`; strongly relevant when the
    reduced training score drops below the interval's lower bound."""
    if ds_v.d == 1:
        reduced_score = _featureless_score(ds_v)
    else:
        reduced = drop_feature(ds_v, position)
        reduced_score = score(fit(params, reduced, rng), reduced)
    return reduced_score < score_interval.lower, reduced_score


def decompose(
    ds: Dataset,
    config: PipelineConfig | None = None,
    rng: np.random.Generator | None = None,
) -> RelevanceReport:
    """Run the full pipeline on a dataset. Deterministic for a fixed seed."""
    config = config or PipelineConfig()
    if rng is None:
        rng = np.random.default_rng(config.seed)
    boruta_rng, score_rng, imp_rng, minimal_rng, strong_rng = rng.spawn(5)
    everything = FeatureIndexSet.full(ds.d)

    all_relevant = run_boruta(
        config.boruta_params(), ds, config.boruta_max_iter, config.boruta_test_level, boruta_rng
    )
    if len(all_relevant) == 0:
        empty = FeatureIndexSet()
        return RelevanceReport(
            empty,
            empty,
            everything,
            Diagnostics(empty, empty, None, None, {}, {}, 0),
        )

    restricted = select_features(ds, all_relevant)
    loss_params = config.loss_params()
    minimal_params = config.minimal_params()
    score_interval = prediction_interval(
        sample_null(loss_params, restricted, config.alpha, score_rng).scores, config.p_value
    )
    importance_interval = prediction_interval(
        sample_null(minimal_params, restricted, config.alpha, imp_rng).shadow_importances,
        config.p_value,
    )

    a_list = list(all_relevant)
    imps = _fit_importances(minimal_params, restricted, minimal_rng)
    minimal_positions = np.nonzero(imps > importance_interval.upper)[0]
    minimal = FeatureIndexSet.of(a_list[p] for p in minimal_positions).intersection(all_relevant)

    strong_ids: list[int] = []
    reduced_scores: dict[int, float] = {}
    tests_run = 0
    test_streams = strong_rng.spawn(max(1, len(minimal)))
    for stream, j in zip(test_streams, minimal):
        position = a_list.index(j)
        is_strong, reduced_score = strong_test(
            restricted, position, score_interval, loss_params, stream
        )
        tests_run += 1
        reduced_scores[j] = reduced_score
        if is_strong:
            strong_ids.append(j)

    strong = FeatureIndexSet.of(strong_ids)
    weak = all_relevant.difference(strong)
    irrelevant = everything.difference(all_relevant)
    return RelevanceReport(
        strong,
        weak,
        irrelevant,
        Diagnostics(
            all_relevant,
            minimal,
            score_interval,
            importance_interval,
            reduced_scores,
            {j: float(imps[p]) for p, j in enumerate(a_list)},
            tests_run,
        ),
    )
