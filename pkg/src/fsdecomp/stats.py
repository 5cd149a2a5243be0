"""Null-distribution sampling and Student-t prediction intervals.

`sample_null` refits the forest alpha times on shadow-extended copies of a
dataset, recording the training score and the shadow column's gain importance
of each refit. `prediction_interval` turns either sample into the standard
Student-t interval for one future observation:

    mean +- t(1 - p/2, n - 1) * sd * sqrt(1 + 1/n)

The t quantile is computed here by numerically inverting the regularized
incomplete beta function rather than through an external stats library, so the
test suite can check it against an independent quadrature oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, extend_with_random_shadow
from .forest import ForestParams, fit, importance_gain, score

_MAX_CF_ITER = 300
_CF_EPS = 1e-16
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _CF_EPS:
            return h
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), accurate in a relative sense near both endpoints."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_quantile(prob: float, dof: int) -> float:
    """Inverse CDF of Student's t with `dof` degrees of freedom.

    Solved by bisecting log(x) in the identity 2*P(T > t) = I_x(dof/2, 1/2)
    with x = dof / (dof + t^2), which keeps full relative precision far out
    in the tails.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must be in (0, 1), got {prob}")
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if prob == 0.5:
        return 0.0
    # tail mass of the matching one-sided tail; 1 - prob is exact for prob > 0.5
    tail = 1.0 - prob if prob > 0.5 else prob
    target = 2.0 * tail
    a = 0.5 * dof
    b = 0.5
    # I_x(a, b) is strictly increasing in x; bracket the root in log space
    lo, hi = -745.0, 0.0  # exp(-745) underflows to ~5e-324
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if regularized_incomplete_beta(a, b, math.exp(mid)) < target:
            lo = mid
        else:
            hi = mid
    x = math.exp(0.5 * (lo + hi))
    t = math.sqrt(dof * (1.0 - x) / x)
    return t if prob > 0.5 else -t


@dataclass(frozen=True)
class IntervalStatistic:
    """A Student-t prediction interval over a sample of measurements."""

    mean: float
    sd: float
    n: int
    p: float
    lower: float
    upper: float


def prediction_interval(samples, p: float) -> IntervalStatistic:
    """Interval expected to contain one future draw from the samples' population.

    Uses the sample standard deviation (n-1 denominator). A zero-variance
    sample collapses to a point. The lower bound is never clamped, even for
    nonnegative quantities such as importances.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    n = x.shape[0]
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        return IntervalStatistic(mean, 0.0, n, p, mean, mean)
    half = t_quantile(1.0 - p / 2.0, n - 1) * sd * math.sqrt(1.0 + 1.0 / n)
    return IntervalStatistic(mean, sd, n, p, mean - half, mean + half)


@dataclass(frozen=True)
class NullSamples:
    """Per-refit training scores and shadow-column importances, both length alpha."""

    scores: np.ndarray
    shadow_importances: np.ndarray


def sample_null(
    params: ForestParams, ds: Dataset, alpha: int, rng: np.random.Generator
) -> NullSamples:
    """Jointly sample the null distributions of model score and shadow importance.

    Each of the alpha rounds appends a fresh random shadow column, refits the
    forest on the extended data, and records that model's training score
    together with the shadow column's gain importance. Rounds use independent
    substreams, so the sample set does not depend on evaluation order.
    """
    if alpha < 2:
        raise ValueError(f"alpha must be >= 2, got {alpha}")
    scores = np.empty(alpha, dtype=np.float64)
    shadow_imps = np.empty(alpha, dtype=np.float64)
    for s, stream in enumerate(rng.spawn(alpha)):
        extended, shadow_idx = extend_with_random_shadow(ds, stream)
        model = fit(params, extended, stream)
        scores[s] = score(model, extended)
        shadow_imps[s] = importance_gain(model)[shadow_idx]
    return NullSamples(scores, shadow_imps)
