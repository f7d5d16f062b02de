"""Wilcoxon rank-sum test and summary statistics for repeated runs."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm, rankdata

# both samples at least this large -> normal approximation
NORMAL_MIN_SIZE = 8


def rank_sum_test(sample_a, sample_b) -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value.

    Exact over all reassignments of the pooled mid-ranks when either sample
    has fewer than 8 values; otherwise the tie-corrected normal approximation
    with continuity correction.
    """
    a = np.asarray(sample_a, dtype=np.float64).ravel()
    b = np.asarray(sample_b, dtype=np.float64).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    if min(a.size, b.size) < NORMAL_MIN_SIZE:
        return _exact(a, b)
    return _normal(a, b)


def _exact(a: np.ndarray, b: np.ndarray) -> float:
    n1 = a.size
    ranks2 = np.rint(2 * rankdata(np.concatenate([a, b]))).astype(np.int64)
    total = int(ranks2.sum())
    centre2 = n1 * (ranks2.size + 1)  # twice the expected rank sum, as an integer
    obs = int(ranks2[:n1].sum())
    dev = abs(obs - centre2)
    # dp[k, s]: number of k-subsets of the pooled ranks with doubled rank sum s
    dp = np.zeros((n1 + 1, total + 1))
    dp[0, 0] = 1.0
    for r in ranks2:
        dp[1:, r:] = dp[1:, r:] + dp[:-1, : total + 1 - r]
    counts = dp[n1]
    sums = np.arange(total + 1)
    extreme = np.abs(sums - centre2) >= dev
    return float(min(1.0, counts[extreme].sum() / counts.sum()))


def _normal(a: np.ndarray, b: np.ndarray) -> float:
    n1, n2 = a.size, b.size
    n = n1 + n2
    ranks = rankdata(np.concatenate([a, b]))
    u = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    mu = n1 * n2 / 2.0
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(ties**3 - ties)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (abs(u - mu) - 0.5) / math.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(max(z, 0.0))))


def summarize(values) -> dict:
    v = np.asarray([x for x in values if x is not None], dtype=np.float64)
    if v.size == 0:
        return {"mean": None, "std": None, "median": None, "n": 0}
    return {
        "mean": float(v.mean()),
        "std": float(v.std(ddof=1)) if v.size > 1 else 0.0,
        "median": float(np.median(v)),
        "n": int(v.size),
    }


def mark(p_value: float, mean_other: float, mean_ref: float, alpha: float = 0.05) -> str:
    """'-', '~' or '+' for how ``other`` compares to the reference (higher is better)."""
    if p_value >= alpha:
        return "~"
    return "+" if mean_other > mean_ref else "-"
