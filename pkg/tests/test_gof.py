"""Goodness-of-fit helpers, checked against hand-computed statistics."""

import math

import numpy as np
import pytest
from scipy import stats

from fracq import ParameterError, ecdf, ks_one_sample, ks_two_sample
from fracq.gof import chi_square_counts


def test_ecdf_by_hand():
    vals, probs = ecdf([3.0, 1.0, 3.0, 2.0])
    np.testing.assert_allclose(vals, [1.0, 2.0, 3.0])
    np.testing.assert_allclose(probs, [0.25, 0.5, 1.0])
    with pytest.raises(ParameterError):
        ecdf([])


def test_ks_one_sample_uniform():
    rng = np.random.default_rng(7)
    x = rng.random(5000)
    stat, p = ks_one_sample(x, lambda t: np.clip(t, 0.0, 1.0))
    assert p > 1e-3
    _, p_bad = ks_one_sample(x**3, lambda t: np.clip(t, 0.0, 1.0))
    assert p_bad < 1e-10


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(8)
    x, y = rng.normal(size=400), rng.normal(size=600)
    stat, p = ks_two_sample(x, y)
    ref = stats.ks_2samp(x, y)
    assert math.isclose(stat, ref.statistic)
    assert math.isclose(p, ref.pvalue)


def test_chi_square_hand_case():
    # two equiprobable cells, observed 55/45: statistic (55-50)^2/50 * 2 = 1.0
    sample = np.concatenate([np.zeros(55, dtype=int), np.ones(45, dtype=int)])
    stat, p, dof = chi_square_counts(sample, [0.5, 0.5], min_expected=1.0)
    assert math.isclose(stat, 1.0)
    assert dof == 1
    assert math.isclose(p, stats.chi2.sf(1.0, 1))


def test_chi_square_exact_expected_is_zero():
    sample = np.repeat([0, 1, 2], [20, 30, 50])
    stat, _, _ = chi_square_counts(sample, [0.2, 0.3, 0.5], min_expected=1.0)
    assert stat < 1e-12  # only pmf roundoff


def test_chi_square_overflow_cell():
    # values beyond the pmf length land in the complementary-mass cell
    sample = np.repeat([0, 1, 5], [40, 40, 20])
    stat, _, dof = chi_square_counts(sample, [0.4, 0.4], min_expected=1.0)
    assert stat < 1e-12
    assert dof == 2


def test_chi_square_tail_pooling():
    # tiny tail probabilities get pooled, keeping every expected cell >= 5
    pmf = [0.4, 0.3, 0.2, 0.06, 0.02, 0.01]
    sample = np.repeat(np.arange(6), [40, 30, 20, 6, 2, 2])
    stat, _, dof = chi_square_counts(sample, pmf, min_expected=5.0)
    # expected 40, 30, 20, 6, 2, 1, 1: the last three pool into the 6 cell
    assert dof == 3
    assert stat < 1e-12


def test_chi_square_detects_wrong_pmf():
    rng = np.random.default_rng(9)
    sample = rng.poisson(3.0, size=20_000)
    good = stats.poisson.pmf(np.arange(30), 3.0)
    bad = stats.poisson.pmf(np.arange(30), 3.3)
    _, p_good, _ = chi_square_counts(sample, good)
    _, p_bad, _ = chi_square_counts(sample, bad)
    assert p_good > 1e-3
    assert p_bad < 1e-6


def test_chi_square_validation():
    with pytest.raises(ParameterError):
        chi_square_counts([], [0.5, 0.5])
    with pytest.raises(ParameterError):
        chi_square_counts([-1, 0], [0.5, 0.5])
    with pytest.raises(ParameterError):
        chi_square_counts([0, 1], [0.7, 0.7])
    with pytest.raises(ParameterError):
        chi_square_counts([0, 1], [])
