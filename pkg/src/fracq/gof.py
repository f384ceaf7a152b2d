"""Goodness-of-fit utilities: empirical CDFs, Kolmogorov-Smirnov wrappers,
and a chi-square test with tail pooling for integer-valued samples."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .errors import ParameterError


def ecdf(sample) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct values and the empirical CDF evaluated at them."""
    x = np.sort(np.asarray(sample, dtype=float))
    if x.size == 0:
        raise ParameterError("empty sample")
    vals, counts = np.unique(x, return_counts=True)
    return vals, np.cumsum(counts) / x.size


def ks_two_sample(x, y) -> tuple[float, float]:
    """Two-sample KS statistic and p-value."""
    res = stats.ks_2samp(np.asarray(x, dtype=float), np.asarray(y, dtype=float), method="auto")
    return float(res.statistic), float(res.pvalue)


def ks_one_sample(x, cdf) -> tuple[float, float]:
    """One-sample KS test of `x` against a vectorized CDF callable."""
    res = stats.kstest(np.asarray(x, dtype=float), cdf)
    return float(res.statistic), float(res.pvalue)


def chi_square_counts(sample, pmf, min_expected: float = 5.0) -> tuple[float, float, int]:
    """Chi-square GOF test of an integer sample against pmf[n] = P(N = n).

    Outcomes >= len(pmf) fall into an overflow cell with the complementary
    probability.  Cells are pooled from the right until every expected count
    reaches `min_expected`.  Returns (statistic, p-value, degrees of freedom).
    """
    x = np.asarray(sample)
    if x.size == 0:
        raise ParameterError("empty sample")
    if np.any(x < 0):
        raise ParameterError("sample must be nonnegative integers")
    probs = np.asarray(pmf, dtype=float)
    if probs.size == 0 or np.any(probs < 0) or probs.sum() > 1.0 + 1e-9:
        raise ParameterError("pmf must be nonnegative with total mass at most 1")
    n = x.size
    n_cells = probs.size + 1
    observed = np.bincount(np.minimum(x, probs.size), minlength=n_cells).astype(float)
    expected = n * np.concatenate([probs, [max(0.0, 1.0 - probs.sum())]])

    # pool from the right tail until the last live cell is big enough
    obs_list, exp_list = list(observed), list(expected)
    while len(obs_list) > 2 and exp_list[-1] < min_expected:
        tail_e, tail_o = exp_list.pop(), obs_list.pop()
        exp_list[-1] += tail_e
        obs_list[-1] += tail_o
    # pool any remaining small interior cells into their right neighbor
    i = 0
    while i < len(exp_list):
        if exp_list[i] < min_expected and len(exp_list) > 2:
            moved_e, moved_o = exp_list.pop(i), obs_list.pop(i)
            j = i if i < len(exp_list) else i - 1
            exp_list[j] += moved_e
            obs_list[j] += moved_o
        else:
            i += 1
    obs_arr, exp_arr = np.asarray(obs_list), np.asarray(exp_list)
    if np.any(exp_arr <= 0):
        raise ParameterError("expected counts must be positive after pooling")
    dof = obs_arr.size - 1
    if dof < 1:
        raise ParameterError("need at least two cells after pooling")
    statistic = float(((obs_arr - exp_arr) ** 2 / exp_arr).sum())
    pvalue = float(stats.chi2.sf(statistic, dof))
    return statistic, pvalue, dof
