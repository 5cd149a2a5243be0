"""Benchmark harness: selection metrics, an RFE-CV baseline, preset runs.

Per (preset, repeat) the harness derives child seeds from the master seed so
that reruns and cross-method comparisons see identical datasets. Linear
presets are generated once per preset and bootstrapped per repeat; nonlinear
presets are regenerated fresh per repeat. Wall-clock timing covers feature
selection only.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import CLASSIFICATION, Dataset, FeatureIndexSet, bootstrap_rows, select_features, take_rows
from .decompose import PipelineConfig, RelevanceReport, decompose
from .forest import ForestParams, fit, importance_gain, score
from .synth import GroundTruth, LinearSpec, canonical_preset_name, generate, preset

METHODS = ("sq", "rfe")

CSV_COLUMNS = (
    "preset",
    "repeat",
    "method",
    "precision",
    "recall",
    "f1",
    "strong_precision",
    "strong_recall",
    "weak_precision",
    "weak_recall",
    "train_accuracy",
    "seconds",
)


@dataclass(frozen=True)
class ClassMetrics:
    """Precision/recall/F1 with explicit undefined markers (None) for 0/0."""

    tp: int
    fp: int
    fn: int
    precision: float | None
    recall: float | None
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "ClassMetrics":
        if min(tp, fp, fn) < 0:
            raise ValueError("counts must be nonnegative")
        precision = tp / (tp + fp) if tp + fp > 0 else None
        recall = tp / (tp + fn) if tp + fn > 0 else None
        f1 = 0.0 if tp == 0 else 2.0 * precision * recall / (precision + recall)
        return cls(tp, fp, fn, precision, recall, f1)

    @classmethod
    def from_sets(cls, selected: FeatureIndexSet, truth: FeatureIndexSet) -> "ClassMetrics":
        s, t = selected.as_set(), truth.as_set()
        return cls.from_counts(len(s & t), len(s - t), len(t - s))


def relevance_metrics(report: RelevanceReport, truth: GroundTruth) -> dict[str, ClassMetrics]:
    """Overall (selected vs all-relevant truth) plus per-class strong/weak metrics."""
    d_report = len(report.strong) + len(report.weak) + len(report.irrelevant)
    if d_report != truth.d:
        raise ValueError(f"report covers {d_report} features, truth covers {truth.d}")
    selected = report.strong.union(report.weak)
    return {
        "overall": ClassMetrics.from_sets(selected, truth.relevant()),
        "strong": ClassMetrics.from_sets(report.strong, truth.strong),
        "weak": ClassMetrics.from_sets(report.weak, truth.weak),
    }


def rfe_cv(
    params: ForestParams,
    ds: Dataset,
    folds: int = 5,
    rng: np.random.Generator | None = None,
) -> FeatureIndexSet:
    """Recursive feature elimination with the set size chosen by k-fold CV.

    At every size: score the current set by cross-validated accuracy, then
    drop the feature with the lowest full-data gain importance (full refit,
    all features available to every tree). Returns the recorded set with the
    best mean CV score; ties go to the smallest set.
    """
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if ds.n < 2 * folds:
        raise ValueError(f"n={ds.n} too small for {folds}-fold CV")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    params = replace(params, feature_fraction=1.0)
    perm = rng.permutation(ds.n)
    fold_rows = np.array_split(perm, folds)
    current = list(range(ds.d))
    best_set: list[int] | None = None
    best_cv = -np.inf
    while True:
        subset = FeatureIndexSet.of(current)
        sub_ds = select_features(ds, subset)
        cv = _cv_accuracy(params, sub_ds, fold_rows, rng)
        if cv >= best_cv:  # >= prefers the later (smaller) set on ties
            best_cv = cv
            best_set = list(subset)
        if len(current) == 1:
            break
        imps = importance_gain(fit(params, sub_ds, rng))
        drop_pos = int(np.argmin(imps))
        current = [j for t, j in enumerate(subset) if t != drop_pos]
    return FeatureIndexSet.of(best_set)


def _cv_accuracy(
    params: ForestParams,
    ds: Dataset,
    fold_rows: Sequence[np.ndarray],
    rng: np.random.Generator,
) -> float:
    scores = []
    all_rows = np.arange(ds.n)
    for held in fold_rows:
        train = np.setdiff1d(all_rows, held)
        model = fit(params, take_rows(ds, train), rng)
        scores.append(score(model, take_rows(ds, held)))
    return float(np.mean(scores))


@dataclass(frozen=True)
class RunRecord:
    preset: str
    repeat: int
    method: str
    overall: ClassMetrics
    strong: ClassMetrics | None
    weak: ClassMetrics | None
    train_accuracy: float
    seconds: float

    def row(self) -> dict[str, object]:
        return {
            "preset": self.preset,
            "repeat": self.repeat,
            "method": self.method,
            "precision": self.overall.precision,
            "recall": self.overall.recall,
            "f1": self.overall.f1,
            "strong_precision": self.strong.precision if self.strong else None,
            "strong_recall": self.strong.recall if self.strong else None,
            "weak_precision": self.weak.precision if self.weak else None,
            "weak_recall": self.weak.recall if self.weak else None,
            "train_accuracy": self.train_accuracy,
            "seconds": self.seconds,
        }


@dataclass(frozen=True)
class BenchResult:
    runs: tuple[RunRecord, ...]
    aggregates: tuple[dict[str, object], ...]


def _derived_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, *key]))


_STREAM_DATA, _STREAM_SQ, _STREAM_RFE, _STREAM_ACC = range(4)


def _mean_defined(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


def run_bench(
    preset_names: Sequence[str],
    repeats: int,
    methods: Sequence[str],
    master_seed: int = 0,
    out_dir: str | Path | None = None,
    config: PipelineConfig | None = None,
    folds: int = 5,
) -> BenchResult:
    """Run each method on each preset x repeat; emit per-run CSV and aggregate JSON.

    The CSV (runs.csv) holds one row per run; aggregates.json holds the
    arithmetic means over repeats, with undefined metrics excluded from means.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    names = [canonical_preset_name(p) for p in preset_names]
    methods = [m.lower() for m in methods]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; known: {', '.join(METHODS)}")
    config = config or PipelineConfig()
    runs: list[RunRecord] = []
    for name in names:
        spec = preset(name)
        preset_key = list(canonical_name_registry()).index(name)
        is_linear = isinstance(spec, LinearSpec)
        base = None
        if is_linear:
            base, truth_base = generate(spec, _derived_rng(master_seed, preset_key))
        for repeat in range(repeats):
            data_rng = _derived_rng(master_seed, preset_key, repeat, _STREAM_DATA)
            if is_linear:
                ds = bootstrap_rows(base, 1.0, without_replacement=False, rng=data_rng)
                truth = truth_base
            else:
                ds, truth = generate(spec, data_rng)
            for method in methods:
                runs.append(
                    _run_one(name, repeat, method, ds, truth, master_seed, preset_key, config, folds)
                )
    aggregates = _aggregate(runs)
    result = BenchResult(tuple(runs), tuple(aggregates))
    if out_dir is not None:
        emit(result, out_dir)
    return result


def canonical_name_registry() -> tuple[str, ...]:
    from .synth import PRESET_NAMES

    return PRESET_NAMES


def _run_one(
    name: str,
    repeat: int,
    method: str,
    ds: Dataset,
    truth: GroundTruth,
    master_seed: int,
    preset_key: int,
    config: PipelineConfig,
    folds: int,
) -> RunRecord:
    if method == "sq":
        rng = _derived_rng(master_seed, preset_key, repeat, _STREAM_SQ)
        t0 = time.perf_counter()
        report = decompose(ds, config, rng)
        seconds = time.perf_counter() - t0
        metrics = relevance_metrics(report, truth)
        overall, strong, weak = metrics["overall"], metrics["strong"], metrics["weak"]
        acc_params = config.loss_params()
    else:
        rng = _derived_rng(master_seed, preset_key, repeat, _STREAM_RFE)
        t0 = time.perf_counter()
        selected = rfe_cv(config.loss_params(), ds, folds, rng)
        seconds = time.perf_counter() - t0
        overall = ClassMetrics.from_sets(selected, truth.relevant())
        strong = weak = None
        acc_params = replace(config.loss_params(), feature_fraction=1.0)
    acc_rng = _derived_rng(master_seed, preset_key, repeat, _STREAM_ACC)
    train_accuracy = score(fit(acc_params, ds, acc_rng), ds)
    return RunRecord(name, repeat, method, overall, strong, weak, train_accuracy, seconds)


def _aggregate(runs: list[RunRecord]) -> list[dict[str, object]]:
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    order: list[tuple[str, str]] = []
    for r in runs:
        key = (r.preset, r.method)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    out = []
    for preset_name, method in order:
        rows = [r.row() for r in groups[(preset_name, method)]]
        agg: dict[str, object] = {"preset": preset_name, "method": method, "repeats": len(rows)}
        for col in CSV_COLUMNS[3:]:
            agg[col] = _mean_defined([row[col] for row in rows])
        out.append(agg)
    return out


def emit(result: BenchResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write runs.csv and aggregates.json under out_dir; returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "runs.csv"
    json_path = out_dir / "aggregates.json"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in result.runs:
            row = r.row()
            writer.writerow(["" if row[c] is None else _fmt(row[c]) for c in CSV_COLUMNS])
    json_path.write_text(
        json.dumps({"aggregates": list(result.aggregates)}, indent=2) + "\n", encoding="utf-8"
    )
    return csv_path, json_path


def _fmt(v: object) -> str:
    return repr(v) if isinstance(v, float) else str(v)
