"""All-relevant feature selection by iterated shadow contrast.

Every round appends a freshly permuted shadow clone of each undecided feature,
refits the forest, and awards a hit to every real feature whose gain
importance strictly exceeds the maximum shadow importance. Hit counts are
tested against Binomial(iteration, 1/2) with a Bonferroni-corrected exact
two-sided test; significant features are confirmed (upper tail) or rejected
(lower tail) and never revisited. Features still undecided at the iteration
cap are resolved by comparing their median importance history against the
median of the per-round shadow maxima.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .data import Dataset, FeatureIndexSet
from .forest import ForestParams, fit, importance_gain

TENTATIVE = 0
CONFIRMED = 1
REJECTED = -1


@lru_cache(maxsize=65536)
def binomial_two_sided_p(hits: int, trials: int) -> float:
    """Exact two-sided binomial p-value at success probability 1/2.

    Sums the probability mass of every outcome no more likely than the
    observed one, in integer arithmetic.
    """
    if not 0 <= hits <= trials:
        raise ValueError(f"need 0 <= hits <= trials, got hits={hits}, trials={trials}")
    if trials == 0:
        return 1.0
    observed = comb(trials, hits)
    total = sum(c for k in range(trials + 1) if (c := comb(trials, k)) <= observed)
    return float(Fraction(total, 1 << trials))


@lru_cache(maxsize=65536)
def binomial_upper_p(hits: int, trials: int) -> float:
    """One-sided P(X >= hits) for X ~ Binomial(trials, 1/2)."""
    if not 0 <= hits <= trials:
        raise ValueError(f"need 0 <= hits <= trials, got hits={hits}, trials={trials}")
    total = sum(comb(trials, k) for k in range(hits, trials + 1))
    return float(Fraction(total, 1 << trials))


@dataclass
class BorutaState:
    """Mutable per-run bookkeeping: hit counters, decisions, histories."""

    d: int
    hits: np.ndarray = field(init=False)
    decided: np.ndarray = field(init=False)
    iteration: int = 0
    importance_history: list[dict[int, float]] = field(init=False)
    shadow_max_history: list[float] = field(init=False)

    def __post_init__(self) -> None:
        self.hits = np.zeros(self.d, dtype=np.int64)
        self.decided = np.full(self.d, TENTATIVE, dtype=np.int64)
        self.importance_history = []
        self.shadow_max_history = []

    def undecided(self) -> np.ndarray:
        return np.nonzero(self.decided == TENTATIVE)[0]


def run_boruta(
    params: ForestParams,
    ds: Dataset,
    max_iter: int = 100,
    test_level: float = 0.05,
    rng: np.random.Generator | None = None,
) -> FeatureIndexSet:
    """Return the all-relevant feature set of `ds`.

    `params` should carry the low feature fraction used for shadow contrast.
    The binomial decision level is Bonferroni-corrected across all d features.
    Stops early once every feature is decided.
    """
    if max_iter < 10:
        raise ValueError(f"max_iter must be >= 10, got {max_iter}")
    if not 0.0 < test_level < 1.0:
        raise ValueError(f"test_level must be in (0, 1), got {test_level}")
    if rng is None:
        rng = np.random.default_rng(params.seed)
    d = ds.d
    level = test_level / d
    state = BorutaState(d)
    while state.iteration < max_iter:
        undecided = state.undecided()
        if undecided.size == 0:
            break
        state.iteration += 1
        active = np.nonzero(state.decided != REJECTED)[0]
        n_active = active.size
        n_shadow = undecided.size
        X = np.empty((ds.n, n_active + n_shadow), dtype=np.float64, order="F")
        X[:, :n_active] = ds.X[:, active]
        for t, j in enumerate(undecided):
            X[:, n_active + t] = rng.permutation(ds.X[:, j])
        names = tuple(ds.names[j] for j in active) + tuple(
            ds.names[j] + "_shadow" for j in undecided
        )
        extended = Dataset(X, ds.y, ds.task, names)
        model = fit(params, extended, rng)
        imp = importance_gain(model)
        shadow_max = float(imp[n_active:].max())
        state.shadow_max_history.append(shadow_max)
        pos_of = {int(j): t for t, j in enumerate(active)}
        round_imps: dict[int, float] = {}
        for j in undecided:
            imp_j = float(imp[pos_of[int(j)]])
            round_imps[int(j)] = imp_j
            if imp_j > shadow_max:
                state.hits[j] += 1
        state.importance_history.append(round_imps)
        for j in undecided:
            p = binomial_two_sided_p(int(state.hits[j]), state.iteration)
            if p <= level:
                state.decided[j] = (
                    CONFIRMED if state.hits[j] * 2 > state.iteration else REJECTED
                )
    _resolve_tentative(state)
    return FeatureIndexSet.of(np.nonzero(state.decided == CONFIRMED)[0])


def _resolve_tentative(state: BorutaState) -> None:
    """Settle leftovers by median importance against the median shadow maximum."""
    undecided = state.undecided()
    if undecided.size == 0:
        return
    shadow_median = float(np.median(state.shadow_max_history))
    for j in undecided:
        history = [imps[int(j)] for imps in state.importance_history if int(j) in imps]
        state.decided[j] = CONFIRMED if float(np.median(history)) > shadow_median else REJECTED
