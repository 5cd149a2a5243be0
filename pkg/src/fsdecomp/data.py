"""Immutable dataset container plus the column/row operations the pipeline is built on.

Feature matrices are stored column-major (the workload is feature-sliced:
split scans, permutations and column drops all walk single columns).
All operations are pure: they never mutate their inputs and are fully
determined by (inputs, rng state).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

CLASSIFICATION = "classification"
REGRESSION = "regression"
_TASKS = (CLASSIFICATION, REGRESSION)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix X (n x d), target y (n,), task kind and column names.

    Invariants enforced at construction: n >= 2, d >= 1, all entries finite,
    len(y) == n, classification targets in {0, 1}. Instances are immutable;
    every transformation returns a new value.
    """

    X: np.ndarray
    y: np.ndarray
    task: str
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        # Always copy so freezing never mutates a caller-owned array.
        X = np.array(self.X, dtype=np.float64, order="F", copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 2:
            raise ValueError(f"need at least 2 samples, got {n}")
        if d < 1:
            raise ValueError("need at least 1 feature")
        if y.shape != (n,):
            raise ValueError(f"y has length {y.shape}, expected ({n},)")
        if not np.isfinite(X).all():
            raise ValueError("X contains non-finite entries")
        if not np.isfinite(y).all():
            raise ValueError("y contains non-finite entries")
        if self.task not in _TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION and not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("classification targets must be 0 or 1")
        names = tuple(str(c) for c in self.names)
        if len(names) != d:
            raise ValueError(f"{len(names)} names for {d} columns")
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "y", _freeze(y))
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def column(self, j: int) -> np.ndarray:
        self._check_index(j)
        return self.X[:, j]

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self.d:
            raise IndexError(f"feature index {j} out of range [0, {self.d})")


@dataclass(frozen=True)
class FeatureIndexSet:
    """An ordered, duplicate-free set of feature indices."""

    indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in {idx}")
        if any(i < 0 for i in idx):
            raise ValueError(f"negative index in {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "FeatureIndexSet":
        return cls(tuple(sorted({int(i) for i in indices})))

    @classmethod
    def full(cls, d: int) -> "FeatureIndexSet":
        return cls(tuple(range(d)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, j: int) -> bool:
        return j in set(self.indices)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.indices)

    def union(self, other: "FeatureIndexSet") -> "FeatureIndexSet":
        return FeatureIndexSet.of(self.as_set() | other.as_set())

    def intersection(self, other: "FeatureIndexSet") -> "FeatureIndexSet":
        return FeatureIndexSet.of(self.as_set() & other.as_set())

    def difference(self, other: "FeatureIndexSet") -> "FeatureIndexSet":
        return FeatureIndexSet.of(self.as_set() - other.as_set())

    def complement(self, d: int) -> "FeatureIndexSet":
        return FeatureIndexSet.of(set(range(d)) - self.as_set())

    def validate_for(self, ds: Dataset) -> None:
        for j in self.indices:
            ds._check_index(j)


def load_csv(path: str | Path, target_column: str = "y", task: str = CLASSIFICATION) -> Dataset:
    """Read a numeric, comma-separated file with a header row into a Dataset.

    The target column is removed from the features. Parse failures name the
    offending row (1-based, excluding the header) and column.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header.count(target_column) == 0:
            raise ValueError(f"{path}: target column {target_column!r} not in header {header}")
        if header.count(target_column) > 1:
            raise ValueError(f"{path}: duplicate target column {target_column!r}")
        t_pos = header.index(target_column)
        rows: list[list[float]] = []
        for r, rec in enumerate(reader, start=1):
            if len(rec) != len(header):
                raise ValueError(f"{path}: row {r} has {len(rec)} cells, expected {len(header)}")
            vals = []
            for c, cell in enumerate(rec):
                try:
                    v = float(cell)
                except ValueError:
                    raise ValueError(
                        f"{path}: row {r}, column {header[c]!r}: cannot parse {cell!r}"
                    ) from None
                if not np.isfinite(v):
                    raise ValueError(f"{path}: row {r}, column {header[c]!r}: non-finite value {cell!r}")
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    mat = np.array(rows, dtype=np.float64)
    y = mat[:, t_pos]
    if task == CLASSIFICATION:
        bad = np.nonzero(~np.isin(y, (0.0, 1.0)))[0]
        if bad.size:
            raise ValueError(
                f"{path}: row {bad[0] + 1}, column {target_column!r}: "
                f"classification target {y[bad[0]]!r} not in {{0, 1}}"
            )
    keep = [j for j in range(len(header)) if j != t_pos]
    names = tuple(header[j] for j in keep)
    return Dataset(mat[:, keep], y, task, names)


def save_csv(ds: Dataset, path: str | Path, target_column: str = "y") -> None:
    """Write a Dataset back out in the format load_csv reads."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.names) + [target_column])
        for i in range(ds.n):
            writer.writerow([repr(v) for v in ds.X[i]] + [repr(float(ds.y[i]))])


def permute_feature(ds: Dataset, j: int, rng: np.random.Generator) -> np.ndarray:
    """Return a uniformly random permutation of column j; the dataset is untouched."""
    ds._check_index(j)
    return rng.permutation(ds.X[:, j])


def extend_with_random_shadow(ds: Dataset, rng: np.random.Generator) -> tuple[Dataset, int]:
    """Append a permuted copy of a uniformly chosen column; return (dataset, shadow position).

    The shadow column carries no information about the target by construction
    and always sits at position d of the extended dataset.
    """
    j = int(rng.integers(ds.d))
    shadow = permute_feature(ds, j, rng)
    X = np.empty((ds.n, ds.d + 1), dtype=np.float64, order="F")
    X[:, : ds.d] = ds.X
    X[:, ds.d] = shadow
    return Dataset(X, ds.y, ds.task, ds.names + (ds.names[j] + "_shadow",)), ds.d


def drop_feature(ds: Dataset, j: int) -> Dataset:
    """Dataset without column j; remaining column order and names preserved."""
    ds._check_index(j)
    if ds.d == 1:
        raise ValueError("cannot drop the only feature")
    keep = [c for c in range(ds.d) if c != j]
    return Dataset(ds.X[:, keep], ds.y, ds.task, tuple(ds.names[c] for c in keep))


def select_features(ds: Dataset, s: FeatureIndexSet) -> Dataset:
    """Dataset restricted to the columns in s, in s's order."""
    s.validate_for(ds)
    if len(s) == 0:
        raise ValueError("cannot select an empty feature set")
    cols = list(s)
    return Dataset(ds.X[:, cols], ds.y, ds.task, tuple(ds.names[c] for c in cols))


def take_rows(ds: Dataset, rows: np.ndarray) -> Dataset:
    """Dataset restricted to the given row indices (internal helper for CV/bagging)."""
    return Dataset(ds.X[rows], ds.y[rows], ds.task, ds.names)


def bootstrap_rows(
    ds: Dataset,
    fraction: float,
    without_replacement: bool,
    rng: np.random.Generator,
) -> Dataset:
    """Sample round(fraction * n) rows.

    Without replacement this is the subsampling mode used for per-tree bagging;
    with replacement it is the classic bootstrap used to repeat benchmark runs.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    size = int(round(fraction * ds.n))
    if size < 1:
        raise ValueError(f"fraction {fraction} yields an empty sample for n={ds.n}")
    rows = rng.choice(ds.n, size=size, replace=not without_replacement)
    return take_rows(ds, rows)
