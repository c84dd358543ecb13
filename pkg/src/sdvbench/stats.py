"""Paired significance tests on per-item score differences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _st

__all__ = ["EXACT_WILCOXON_MAX_N", "TestResult", "paired_t", "wilcoxon_signed_rank"]

EXACT_WILCOXON_MAX_N = 20


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n: int


def paired_t(diffs: Sequence[float]) -> TestResult:
    """Two-sided one-sample t test of the mean difference against zero.

    All-zero differences give p = 1. Constant non-zero differences have an
    infinite statistic and give p = 0.
    """
    d = np.asarray(diffs, dtype=float)
    n = d.size
    if n == 0 or np.all(d == 0):
        return TestResult(0.0, 1.0, n)
    mean = float(d.mean())
    if n < 2:
        return TestResult(0.0, 1.0, n)
    # compare exactly: the sample std of equal floats can be roundoff, not zero
    if np.all(d == d[0]):
        return TestResult(math.copysign(math.inf, mean), 0.0, n)
    t = mean / (float(d.std(ddof=1)) / math.sqrt(n))
    p = 2.0 * float(_st.t.sf(abs(t), n - 1))
    return TestResult(t, min(1.0, p), n)


def _ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing the mean rank."""
    return _st.rankdata(values, method="average")


def _exact_tail_probs(doubled_ranks: Sequence[int], w2: int) -> tuple[float, float]:
    """P(W+ <= w) and P(W+ >= w) under random signs, all in doubled-rank units."""
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    denom = 2 ** len(doubled_ranks)
    lower = sum(counts[: w2 + 1])
    upper = sum(counts[w2:])
    return lower / denom, upper / denom


def wilcoxon_signed_rank(diffs: Sequence[float], exact_max_n: int = EXACT_WILCOXON_MAX_N) -> TestResult:
    """Two-sided Wilcoxon signed-rank test; zero differences are discarded.

    The statistic is the positive rank sum W+. For at most ``exact_max_n``
    non-zero differences the p-value comes from the exact sign-flip
    distribution (ties handled with average ranks); above that, from the
    tie-corrected normal approximation.
    """
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0]
    n = d.size
    if n == 0:
        return TestResult(0.0, 1.0, 0)
    ranks = _ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= exact_max_n:
        doubled = [int(round(2 * r)) for r in ranks]
        lower, upper = _exact_tail_probs(doubled, int(round(2 * w_plus)))
        p = min(1.0, 2.0 * min(lower, upper))
        return TestResult(w_plus, p, n)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_counts**3 - tie_counts).sum()) / 48.0
    if var <= 0:
        return TestResult(w_plus, 1.0, n)
    z = (w_plus - mean) / math.sqrt(var)
    p = 2.0 * float(_st.norm.sf(abs(z)))
    return TestResult(w_plus, min(1.0, p), n)
