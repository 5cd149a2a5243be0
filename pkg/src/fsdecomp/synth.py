"""Synthetic classification benchmarks with exact relevance ground truth.

Two families:

* linear: points labelled by the side of a random hyperplane over latent
  features; weak relevance is manufactured by replacing one latent with
  several exact affine copies of it, so each copy is individually sufficient
  and individually removable.
* nonlinear: two Gaussian clusters per class placed at antipodal scaled
  hypercube vertices. Antipodal placement makes linear separation impossible
  for any hyperplane, while per-coordinate magnitude gaps between the classes
  keep every informative coordinate individually detectable. Redundancy again
  comes from affine copies of dedicated latent coordinates.

Both generators return (Dataset, GroundTruth) and are pure functions of
(spec, rng).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import CLASSIFICATION, Dataset, FeatureIndexSet

_MIN_WEIGHT = 0.2  # smallest hyperplane weight magnitude: keeps strong features detectable
_MIN_CLUSTER = 5


@dataclass(frozen=True)
class GroundTruth:
    """The generator's own labels: a disjoint partition of all feature indices."""

    strong: FeatureIndexSet
    weak: FeatureIndexSet
    irrelevant: FeatureIndexSet

    def __post_init__(self) -> None:
        s, w, i = self.strong.as_set(), self.weak.as_set(), self.irrelevant.as_set()
        if (s & w) or (s & i) or (w & i):
            raise ValueError("ground-truth classes overlap")
        union = s | w | i
        if union != set(range(len(union))):
            raise ValueError("ground-truth classes do not partition the feature range")

    @property
    def d(self) -> int:
        return len(self.strong) + len(self.weak) + len(self.irrelevant)

    def relevant(self) -> FeatureIndexSet:
        return self.strong.union(self.weak)

    def to_json(self) -> dict:
        return {
            "strong": list(self.strong),
            "weak": list(self.weak),
            "irrelevant": list(self.irrelevant),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruth":
        return cls(
            FeatureIndexSet.of(obj["strong"]),
            FeatureIndexSet.of(obj["weak"]),
            FeatureIndexSet.of(obj["irrelevant"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class LinearSpec:
    n: int
    n_strong: int
    n_weak: int
    n_irrelevant: int
    noise_scale: float = 1.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if min(self.n_strong, self.n_weak, self.n_irrelevant) < 0:
            raise ValueError("feature counts must be nonnegative")
        if self.n_strong + self.n_weak + self.n_irrelevant < 1:
            raise ValueError("need at least one feature")
        if self.n_weak == 1:
            raise ValueError("n_weak must be 0 or >= 2 (a lone copy would be strongly relevant)")
        if self.noise_scale <= 0:
            raise ValueError("noise_scale must be positive")

    @property
    def d(self) -> int:
        return self.n_strong + self.n_weak + self.n_irrelevant


@dataclass(frozen=True)
class NonlinearSpec:
    n_features: int
    n_strel: int
    n_redundant: int
    n: int = 500
    clusters_per_class: int = 2
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n_strel < 1:
            raise ValueError("n_strel must be >= 1")
        if self.n_redundant == 1:
            raise ValueError("n_redundant must be 0 or >= 2 (a lone copy would be strongly relevant)")
        if self.n_redundant < 0:
            raise ValueError("n_redundant must be nonnegative")
        if self.n_features < self.n_strel + self.n_redundant:
            raise ValueError("n_features must cover strong and redundant features")
        if self.clusters_per_class != 2:
            raise ValueError("only 2 clusters per class are supported")
        n_clusters = 2 * self.clusters_per_class
        if self.n < _MIN_CLUSTER * n_clusters:
            raise ValueError(
                f"n={self.n} too small: every cluster needs >= {_MIN_CLUSTER} samples"
            )

    @property
    def d(self) -> int:
        return self.n_features


def _draw_prototype(k: int, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector whose components all satisfy |w_i| >= 0.2, by resampling."""
    while True:
        w = rng.standard_normal(k)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            continue
        w = w / norm
        if np.abs(w).min() >= _MIN_WEIGHT:
            return w


def _affine_copies(latent: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """count exact affine transforms a*latent + b with |a| in [0.5, 2]."""
    cols = np.empty((latent.shape[0], count), dtype=np.float64)
    for t in range(count):
        a = rng.uniform(0.5, 2.0) * (1.0 if rng.integers(2) == 1 else -1.0)
        b = rng.standard_normal()
        cols[:, t] = a * latent + b
    return cols


def _balanced(y: np.ndarray) -> bool:
    frac = y.mean()
    return 0.25 <= frac <= 0.75


def gen_linear(spec: LinearSpec, rng: np.random.Generator) -> tuple[Dataset, GroundTruth]:
    """Hyperplane-labelled dataset with exact-copy redundancy.

    Latent space has n_strong + 1 dimensions when weak features are requested;
    the extra latent is expanded into n_weak affine copies and dropped.
    Resamples until both classes hold at least 25% of the rows.
    """
    k = spec.n_strong + (1 if spec.n_weak > 0 else 0)
    if k == 0:
        # all-irrelevant: random balanced labels, pure noise features
        y = (rng.random(spec.n) < 0.5).astype(np.float64)
        while not _balanced(y):
            y = (rng.random(spec.n) < 0.5).astype(np.float64)
        X = rng.standard_normal((spec.n, spec.n_irrelevant)) * spec.noise_scale
        names = tuple(f"f{j}" for j in range(spec.n_irrelevant))
        truth = GroundTruth(
            FeatureIndexSet(), FeatureIndexSet(), FeatureIndexSet.full(spec.n_irrelevant)
        )
        return Dataset(X, y, CLASSIFICATION, names), truth
    w = _draw_prototype(k, rng)
    while True:
        latent = rng.standard_normal((spec.n, k))
        y = (latent @ w > 0.0).astype(np.float64)
        if _balanced(y):
            break
    blocks = [latent[:, : spec.n_strong]]
    if spec.n_weak > 0:
        blocks.append(_affine_copies(latent[:, k - 1], spec.n_weak, rng))
    if spec.n_irrelevant > 0:
        blocks.append(rng.standard_normal((spec.n, spec.n_irrelevant)) * spec.noise_scale)
    X = np.hstack(blocks)
    names = tuple(f"f{j}" for j in range(spec.d))
    truth = GroundTruth(
        FeatureIndexSet.of(range(spec.n_strong)),
        FeatureIndexSet.of(range(spec.n_strong, spec.n_strong + spec.n_weak)),
        FeatureIndexSet.of(range(spec.n_strong + spec.n_weak, spec.d)),
    )
    return Dataset(X, y, CLASSIFICATION, names), truth


def _group_sizes(total: int, max_per_group: int = 5) -> list[int]:
    """Split `total` copies into ceil(total/max_per_group) near-equal groups (each >= 2)."""
    if total == 0:
        return []
    n_groups = -(-total // max_per_group)
    base = total // n_groups
    rem = total % n_groups
    return [base + (1 if g < rem else 0) for g in range(n_groups)]


def gen_nonlinear(spec: NonlinearSpec, rng: np.random.Generator) -> tuple[Dataset, GroundTruth]:
    """Non-linearly separable clusters with redundancy and noise padding.

    Class c places its two clusters at +v_c and -v_c, where v_c picks a random
    sign per coordinate and a per-coordinate magnitude; the two classes get
    magnitudes separated by a guaranteed gap, randomly assigned, so each
    informative coordinate is individually informative while the antipodal
    layout defeats every linear separator. Redundant copies replace dedicated
    latent coordinates, one group of at most five copies per latent.
    """
    sizes = _group_sizes(spec.n_redundant)
    n_grp = len(sizes)
    k = spec.n_strel + n_grp
    n_irr = spec.n_features - spec.n_strel - spec.n_redundant

    mag_lo = rng.uniform(0.4, 0.8, size=k)
    mag_hi = mag_lo + rng.uniform(0.8, 1.2, size=k)
    swap = rng.integers(2, size=k).astype(bool)
    mag0 = np.where(swap, mag_hi, mag_lo)
    mag1 = np.where(swap, mag_lo, mag_hi)
    c0 = mag0 * np.where(rng.integers(2, size=k) == 1, 1.0, -1.0)
    c1 = mag1 * np.where(rng.integers(2, size=k) == 1, 1.0, -1.0)

    n1 = spec.n // 2
    n0 = spec.n - n1
    centers = []
    for n_c, c in ((n0, c0), (n1, c1)):
        half = n_c // 2
        centers.append(np.vstack([np.tile(c, (half, 1)), np.tile(-c, (n_c - half, 1))]))
    latent = np.vstack(centers) + rng.standard_normal((spec.n, k))
    y = np.concatenate([np.zeros(n0), np.ones(n1)])

    blocks = [latent[:, : spec.n_strel]]
    for g, size in enumerate(sizes):
        blocks.append(_affine_copies(latent[:, spec.n_strel + g], size, rng))
    if n_irr > 0:
        blocks.append(rng.standard_normal((spec.n, n_irr)))
    X = np.hstack(blocks)
    perm = rng.permutation(spec.n)
    X = X[perm]
    y = y[perm]
    names = tuple(f"f{j}" for j in range(spec.n_features))
    truth = GroundTruth(
        FeatureIndexSet.of(range(spec.n_strel)),
        FeatureIndexSet.of(range(spec.n_strel, spec.n_strel + spec.n_redundant)),
        FeatureIndexSet.of(range(spec.n_strel + spec.n_redundant, spec.n_features)),
    )
    return Dataset(X, y, CLASSIFICATION, names), truth


_LINEAR_PRESETS = {
    "Set 1": LinearSpec(n=150, n_strong=6, n_weak=0, n_irrelevant=6),
    "Set 2": LinearSpec(n=150, n_strong=0, n_weak=6, n_irrelevant=6),
    "Set 3": LinearSpec(n=150, n_strong=3, n_weak=4, n_irrelevant=3),
    "Set 4": LinearSpec(n=256, n_strong=6, n_weak=6, n_irrelevant=6),
    "Set 5": LinearSpec(n=512, n_strong=1, n_weak=2, n_irrelevant=11),
    "Set 6": LinearSpec(n=200, n_strong=1, n_weak=20, n_irrelevant=0),
    "Set 7": LinearSpec(n=200, n_strong=1, n_weak=20, n_irrelevant=20),
    "Set 8": LinearSpec(n=2000, n_strong=10, n_weak=10, n_irrelevant=50),
}

_NONLINEAR_PRESETS = {
    "NL 1": NonlinearSpec(n_features=20, n_strel=10, n_redundant=0),
    "NL 2": NonlinearSpec(n_features=20, n_strel=4, n_redundant=10),
    "NL 3": NonlinearSpec(n_features=50, n_strel=10, n_redundant=10),
    "NL 4": NonlinearSpec(n_features=80, n_strel=10, n_redundant=10),
}

PRESET_NAMES = tuple(_LINEAR_PRESETS) + tuple(_NONLINEAR_PRESETS)


def canonical_preset_name(name: str) -> str:
    squashed = name.strip().lower().replace(" ", "").replace("_", "").replace("-", "")
    for known in PRESET_NAMES:
        if squashed == known.lower().replace(" ", ""):
            return known
    raise ValueError(f"unknown preset {name!r}; known presets: {', '.join(PRESET_NAMES)}")


def preset(name: str) -> LinearSpec | NonlinearSpec:
    """Benchmark preset by name ('Set 1'..'Set 8', 'NL 1'..'NL 4'; spacing-insensitive)."""
    key = canonical_preset_name(name)
    return _LINEAR_PRESETS.get(key) or _NONLINEAR_PRESETS[key]


def generate(spec: LinearSpec | NonlinearSpec, rng: np.random.Generator | None = None):
    """Dispatch on spec type; rng defaults to a generator seeded from spec.seed."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    if isinstance(spec, LinearSpec):
        return gen_linear(spec, rng)
    return gen_nonlinear(spec, rng)
