"""Random variate generators: law checks against closed-form transforms and
independence/reproducibility of the stream plumbing."""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gamma as Gamma

from fracq import (
    FppParams,
    ParameterError,
    RngStream,
    inverse_subordinator_moments,
    ml_cdf,
    mittag_leffler,
    MlIndex,
    sample_inverse_subordinator_at,
    sample_mittag_leffler,
    sample_mittag_leffler_trig,
    sample_positive_stable,
)

N_LAW = 200_000
Z_MAX = 4.0


def z_score(sample: np.ndarray, target_mean: float) -> float:
    return (sample.mean() - target_mean) / (sample.std(ddof=1) / math.sqrt(len(sample)))


# stream plumbing


def test_same_seed_reproduces():
    a = sample_positive_stable(0.6, RngStream(seed=42), size=1000)
    b = sample_positive_stable(0.6, RngStream(seed=42), size=1000)
    np.testing.assert_array_equal(a, b)


def test_different_seeds_differ():
    a = sample_positive_stable(0.6, RngStream(seed=1), size=100)
    b = sample_positive_stable(0.6, RngStream(seed=2), size=100)
    assert not np.array_equal(a, b)


def test_stream_index_differs():
    a = RngStream(seed=7, stream_index=0).generator().random(50)
    b = RngStream(seed=7, stream_index=1).generator().random(50)
    assert not np.array_equal(a, b)


def test_generator_continues_one_stream():
    rng = RngStream(seed=5)
    first = rng.generator().random(10)
    second = rng.generator().random(10)
    combined = RngStream(seed=5).generator().random(20)
    np.testing.assert_array_equal(np.concatenate([first, second]), combined)


def test_substream_independent_of_parent_consumption():
    parent = RngStream(seed=9)
    parent.generator().random(1234)  # consume some of the parent stream
    a = parent.substream(3).generator().random(20)
    b = RngStream(seed=9).substream(3).generator().random(20)
    np.testing.assert_array_equal(a, b)


def test_substream_paths_distinct():
    root = RngStream(seed=11)
    draws = {
        "s0": root.substream(0).generator().random(8),
        "s1": root.substream(1).generator().random(8),
        "s0s0": root.substream(0).substream(0).generator().random(8),
        "s0s1": root.substream(0).substream(1).generator().random(8),
    }
    keys = list(draws)
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            assert not np.array_equal(draws[keys[i]], draws[keys[j]])


def test_scalar_and_shape_conventions():
    rng = RngStream(seed=0)
    assert isinstance(sample_positive_stable(0.5, rng), float)
    assert sample_mittag_leffler(FppParams(0.5, 1.0), rng, size=7).shape == (7,)
    assert isinstance(sample_inverse_subordinator_at(0.5, 1.0, rng), float)
    with pytest.raises(ParameterError):
        sample_positive_stable(1.5, rng)
    with pytest.raises(ParameterError):
        sample_inverse_subordinator_at(0.5, -1.0, rng)


# positive stable: Laplace transform E exp(-u S) = exp(-u^theta)


@pytest.mark.parametrize("theta", [0.4, 0.7])
def test_stable_laplace_transform(theta):
    s = sample_positive_stable(theta, RngStream(seed=101), size=N_LAW)
    assert np.all(s > 0.0)
    for u in (0.5, 1.0, 2.0):
        z = z_score(np.exp(-u * s), math.exp(-(u**theta)))
        assert abs(z) < Z_MAX


def test_stable_degenerate_at_one():
    s = sample_positive_stable(1.0, RngStream(seed=0), size=100)
    assert np.all(s == 1.0)


# Mittag-Leffler waiting times


@pytest.mark.parametrize("theta", [0.5, 0.8])
def test_ml_sampler_matches_cdf(theta):
    p = FppParams(theta, 1.3)
    x = sample_mittag_leffler(p, RngStream(seed=21), size=20_000)
    res = stats.kstest(x, lambda v: ml_cdf(p, v))
    assert res.pvalue > 1e-3


@pytest.mark.parametrize("theta", [0.5, 0.8])
def test_ml_two_constructions_agree(theta):
    p = FppParams(theta, 2.0)
    a = sample_mittag_leffler(p, RngStream(seed=31), size=20_000)
    b = sample_mittag_leffler_trig(p, RngStream(seed=32), size=20_000)
    res = stats.ks_2samp(a, b)
    assert res.pvalue > 1e-3


def test_ml_trig_matches_cdf():
    p = FppParams(0.65, 1.0)
    x = sample_mittag_leffler_trig(p, RngStream(seed=41), size=20_000)
    res = stats.kstest(x, lambda v: ml_cdf(p, v))
    assert res.pvalue > 1e-3


@pytest.mark.parametrize("form", [sample_mittag_leffler, sample_mittag_leffler_trig])
def test_ml_exponential_reduction(form):
    p = FppParams(1.0, 2.5)
    x = form(p, RngStream(seed=51), size=20_000)
    res = stats.kstest(x, stats.expon(scale=1.0 / 2.5).cdf)
    assert res.pvalue > 1e-3


def test_ml_rate_scaling():
    # lam enters only as a 1/lam time scale
    a = sample_mittag_leffler(FppParams(0.6, 1.0), RngStream(seed=61), size=1000)
    b = sample_mittag_leffler(FppParams(0.6, 4.0), RngStream(seed=61), size=1000)
    np.testing.assert_allclose(a / 4.0, b, rtol=1e-12)


# inverse clock at a fixed time


def test_inverse_clock_laplace_transform():
    # E exp(-u Y(t)) = E_theta(-u t^theta), the strongest single-time check
    theta, t = 0.6, 2.0
    y = sample_inverse_subordinator_at(theta, t, RngStream(seed=71), size=N_LAW)
    assert np.all(y > 0.0)
    for u in (0.5, 1.0, 3.0):
        target = mittag_leffler(MlIndex(theta), -u * t**theta)
        assert abs(z_score(np.exp(-u * y), target)) < Z_MAX


def test_inverse_clock_moments():
    theta, t = 0.7, 3.0
    y = sample_inverse_subordinator_at(theta, t, RngStream(seed=81), size=N_LAW)
    mean, var = inverse_subordinator_moments(theta, t)
    assert abs(z_score(y, mean)) < Z_MAX
    second = var + mean**2
    assert abs(z_score(y**2, second)) < Z_MAX


def test_inverse_clock_self_similarity():
    # Y(t) =d t^theta Y(1), checked with the same seed on both sides
    theta, t = 0.5, 4.0
    a = sample_inverse_subordinator_at(theta, t, RngStream(seed=91), size=1000)
    b = sample_inverse_subordinator_at(theta, 1.0, RngStream(seed=91), size=1000)
    np.testing.assert_allclose(a, t**theta * b, rtol=1e-12)


def test_inverse_clock_degenerate_at_one():
    y = sample_inverse_subordinator_at(1.0, 2.5, RngStream(seed=0), size=50)
    assert np.all(y == 2.5)
    assert sample_inverse_subordinator_at(1.0, 0.0, RngStream(seed=0)) == 0.0


def test_inverse_clock_mean_formula():
    # E Y(t) = t^theta / Gamma(1 + theta)
    theta, t = 0.4, 1.0
    y = sample_inverse_subordinator_at(theta, t, RngStream(seed=95), size=N_LAW)
    assert abs(z_score(y, 1.0 / Gamma(1.4))) < Z_MAX
