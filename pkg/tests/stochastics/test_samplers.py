"""Tests for the base samplers and multivariate normal factorization."""

import numpy as np
import pytest

from subfield.core.exceptions import FactorizationError
from subfield.stochastics.mvn import cholesky_2x2_batch, mvn_factorize, mvn_sample, mvn_sample_batch
from subfield.stochastics.rng import RngStream
from subfield.stochastics.samplers import sample_gamma, sample_normal, sample_poisson, sample_student_t


@pytest.fixture
def rng():
    return RngStream(2024)


def test_normal_with_zero_sd_returns_mean(rng):
    assert sample_normal(rng, 1.5, 0.0) == 1.5
    np.testing.assert_array_equal(sample_normal(rng, -2.0, 0.0, size=3), [-2.0, -2.0, -2.0])


def test_normal_scalar_and_array(rng):
    assert isinstance(sample_normal(rng, 0.0, 1.0), float)
    assert sample_normal(rng, 0.0, 1.0, size=(2, 3)).shape == (2, 3)


@pytest.mark.parametrize("sd", [-1.0, float("inf")])
def test_normal_rejects_bad_sd(rng, sd):
    with pytest.raises(ValueError):
        sample_normal(rng, 0.0, sd)


def test_gamma_moments(rng):
    draws = sample_gamma(rng, 4.0, 12.0, size=200_000)
    assert draws.min() > 0
    assert draws.mean() == pytest.approx(4.0 / 12.0, abs=2e-3)
    assert draws.var() == pytest.approx(4.0 / 144.0, rel=0.03)


@pytest.mark.parametrize("shape, rate", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
def test_gamma_rejects_nonpositive_parameters(rng, shape, rate):
    with pytest.raises(ValueError):
        sample_gamma(rng, shape, rate)


def test_poisson_returns_int_and_zero_intensity(rng):
    assert isinstance(sample_poisson(rng, 3.0), int)
    assert sample_poisson(rng, 0.0) == 0
    with pytest.raises(ValueError):
        sample_poisson(rng, -0.5)


def test_student_t(rng):
    draws = sample_student_t(rng, 5.0, size=100_000)
    assert abs(np.median(draws)) < 0.02
    with pytest.raises(ValueError):
        sample_student_t(rng, 0.0)


def test_factorize_identity():
    factor = mvn_factorize(np.eye(3))
    assert factor.jitter_used == 0.0
    np.testing.assert_allclose(factor.lower_factor, np.eye(3))


def test_factorize_singular_psd_uses_jitter():
    factor = mvn_factorize(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert 0.0 < factor.jitter_used <= 1e-8


def test_factorize_zero_matrix(rng):
    factor = mvn_factorize(np.zeros((2, 2)))
    np.testing.assert_array_equal(mvn_sample(rng, [1.0, 2.0], factor), [1.0, 2.0])


def test_factorize_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        mvn_factorize(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_factorize_indefinite_raises():
    with pytest.raises(FactorizationError) as info:
        mvn_factorize(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert info.value.max_jitter > 0


def test_batch_sample_covariance(rng):
    cov = np.array([[2.0, 0.6], [0.6, 1.0]])
    draws = mvn_sample_batch(rng, [0.0, 0.0], mvn_factorize(cov), 200_000)
    np.testing.assert_allclose(np.cov(draws.T), cov, atol=0.03)


def test_sample_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        mvn_sample(rng, [0.0, 0.0, 0.0], mvn_factorize(np.eye(2)))


def test_cholesky_2x2_batch():
    l11, l21, l22 = cholesky_2x2_batch([4.0, 0.0, 1.0], [2.0, 0.0, 1.0], [2.0, 3.0, 1.0])
    np.testing.assert_allclose(l11, [2.0, 0.0, 1.0])
    np.testing.assert_allclose(l21, [1.0, 0.0, 1.0])
    np.testing.assert_allclose(l22, [1.0, np.sqrt(3.0), 0.0])
