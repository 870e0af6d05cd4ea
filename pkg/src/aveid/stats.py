"""Statistical primitives for the validation harness.

Pearson correlation with a two-tailed t-test p-value, the two-sample
Kolmogorov-Smirnov test with the asymptotic Kolmogorov distribution, and
plain descriptive statistics (population convention throughout).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import betainc

from .errors import (
    ConstantInputError,
    EmptyInputError,
    LengthMismatchError,
    TooFewSamplesError,
)

SIGNIFICANT_P = 0.05
MARGINAL_P = 0.10


class Significance(str, Enum):
    SIGNIFICANT = "significant"   # p < 0.05
    MARGINAL = "marginal"         # 0.05 <= p < 0.1
    NONE = "none"


def classify_significance(p_value: float) -> Significance:
    if p_value < SIGNIFICANT_P:
        return Significance.SIGNIFICANT
    if p_value < MARGINAL_P:
        return Significance.MARGINAL
    return Significance.NONE


@dataclass(frozen=True, slots=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int
    significance: Significance

    def __post_init__(self):
        if abs(self.r) > 1.0:
            raise ValueError(f"|r| must be <= 1, got {self.r}")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p_value}")
        if self.significance is not classify_significance(self.p_value):
            raise ValueError("significance flag inconsistent with p-value")


@dataclass(frozen=True, slots=True)
class KsResult:
    d_statistic: float
    p_value: float
    n1: int
    n2: int

    def __post_init__(self):
        if not 0.0 <= self.d_statistic <= 1.0:
            raise ValueError(f"d must be in [0, 1], got {self.d_statistic}")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p_value}")


def student_t_sf(t: float, df: int) -> float:
    """One-sided survival P(T > t) of Student's t via the regularized
    incomplete beta function (relative accuracy far below 1e-10)."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(df / 2.0, 0.5, x))
    return tail if t >= 0 else 1.0 - tail


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson r with a two-tailed p-value from the t distribution.

    Requires n >= 3 and both inputs non-constant.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1:
        raise LengthMismatchError("inputs must be 1-dimensional sequences")
    if xs.size != ys.size:
        raise LengthMismatchError(f"length mismatch: {xs.size} vs {ys.size}")
    n = int(xs.size)
    if n < 3:
        raise TooFewSamplesError(f"need at least 3 samples, got {n}")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    if sxx == 0.0:
        raise ConstantInputError("first input is constant; r undefined")
    if syy == 0.0:
        raise ConstantInputError("second input is constant; r undefined")
    # sqrt(sxx * syy) rather than sqrt(sxx) * sqrt(syy): exact linear
    # relationships then produce exactly +/-1 (sqrt(fl(s*s)) == s).
    r = float(np.sum(dx * dy) / math.sqrt(sxx * syy))
    # Clip float noise so perfectly linear inputs report exactly +/-1.
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = abs(r) * math.sqrt(df / (1.0 - r * r))
        p = min(1.0, 2.0 * student_t_sf(t, df))
    return CorrelationResult(r=r, p_value=p, n=n, significance=classify_significance(p))


def _rankdata(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based), ties sharing the mean rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman rank correlation: Pearson on average ranks."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.size != ys.size:
        raise LengthMismatchError(f"length mismatch: {xs.size} vs {ys.size}")
    return pearson(_rankdata(xs), _rankdata(ys))


def kolmogorov_sf(lam: float, max_terms: int = 100) -> float:
    """Asymptotic Kolmogorov survival Q(lam) = 2 * sum (-1)^(k-1) exp(-2 k^2 lam^2).

    Returns 1 for lam small enough that the alternating series cannot
    resolve a value below 1 (the distribution's mass is entirely above).
    """
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, max_terms + 1):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 == 1 else -term
        if term < 1e-16 * max(total, 1e-300):
            break
    else:
        return 1.0  # did not converge: lam is tiny, p is 1 for practical purposes
    return max(0.0, min(1.0, 2.0 * total))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test.

    D is the maximum absolute gap between the two empirical CDFs, evaluated
    at the sorted unique values of the pooled sample (tie-safe). The p-value
    uses the asymptotic Kolmogorov distribution with effective sample size
    n1*n2/(n1+n2).
    """
    xs = np.sort(np.asarray(a, dtype=float))
    ys = np.sort(np.asarray(b, dtype=float))
    n1, n2 = int(xs.size), int(ys.size)
    if n1 == 0 or n2 == 0:
        raise EmptyInputError("both samples must be non-empty")
    grid = np.unique(np.concatenate([xs, ys]))
    cdf1 = np.searchsorted(xs, grid, side="right") / n1
    cdf2 = np.searchsorted(ys, grid, side="right") / n2
    d = float(np.max(np.abs(cdf1 - cdf2)))
    if d == 0.0:
        p = 1.0
    else:
        en = math.sqrt(n1 * n2 / (n1 + n2))
        p = kolmogorov_sf(d * (en + 0.12 + 0.11 / en))
    return KsResult(d_statistic=d, p_value=p, n1=n1, n2=n2)


class DescriptiveStats(NamedTuple):
    mean: float
    std: float  # population convention (denominator n)
    min: float
    max: float
    n: int


def describe(x: Sequence[float]) -> DescriptiveStats:
    xs = np.asarray(x, dtype=float)
    if xs.size == 0:
        raise EmptyInputError("cannot describe an empty sequence")
    return DescriptiveStats(
        mean=float(xs.mean()),
        std=float(xs.std()),
        min=float(xs.min()),
        max=float(xs.max()),
        n=int(xs.size),
    )
