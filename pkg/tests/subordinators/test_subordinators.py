"""Tests for the subordinator families and the compound-Poisson approximation."""

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats
from scipy.special import exp1

from subfield.core.exceptions import UnsupportedOperationError
from subfield.interfaces.subordinator_interface import SubordinatorFamily
from subfield.stochastics.rng import RngStream
from subfield.subordinators.models import SubordinatorKind, SubordinatorModel, SubordinatorPath
from subfield.subordinators.service import (
    cpa_build,
    cpa_from_gamma,
    get_family,
    is_finite_activity,
    laplace_exponent,
    levy_density,
    marginal_density,
    marginal_sample,
    path_sample,
    path_sample_batch,
    zero_subordinator,
)


@pytest.fixture
def gamma_model():
    return SubordinatorModel.gamma(4.0, 12.0)


@pytest.fixture
def rng():
    return RngStream(17)


def test_model_requires_kind_parameters():
    with pytest.raises(ValidationError):
        SubordinatorModel(kind=SubordinatorKind.GAMMA, gamma_shape=1.0)
    with pytest.raises(ValidationError):
        SubordinatorModel(kind=SubordinatorKind.POISSON)
    with pytest.raises(ValidationError):
        SubordinatorModel(kind=SubordinatorKind.STUDENT_T_UNIT_TIME, t_dof=3.0, drift=1.0)


def test_every_family_implements_protocol(gamma_model):
    models = [gamma_model, SubordinatorModel.poisson(2.0), SubordinatorModel.student_t(3.0), cpa_from_gamma(1.0, 1.0, 0.1)]
    for model in models:
        assert isinstance(get_family(model), SubordinatorFamily)


def test_marginal_at_zero_is_zero(rng, gamma_model):
    assert marginal_sample(rng, gamma_model, 0.0) == 0.0
    with pytest.raises(ValueError):
        marginal_sample(rng, gamma_model, -1.0)


def test_gamma_increments_match_marginal_law(rng, gamma_model):
    draws = marginal_sample(rng, gamma_model, 1.5, size=20_000)
    result = stats.kstest(draws, stats.gamma(6.0, scale=1.0 / 12.0).cdf)
    assert result.pvalue > 0.001


def test_gamma_drift_shifts_samples(rng):
    draws = marginal_sample(rng, SubordinatorModel.gamma(1.0, 1.0, drift=2.0), 0.5, size=1000)
    assert draws.min() >= 1.0


def test_poisson_increments(rng):
    model = SubordinatorModel.poisson(3.0)
    draws = marginal_sample(rng, model, 2.0, size=20_000)
    np.testing.assert_array_equal(draws, np.round(draws))
    assert draws.mean() == pytest.approx(6.0, abs=0.1)
    assert marginal_density(model, 2.0, 3.0) == pytest.approx(stats.poisson.pmf(3, 6.0))
    assert marginal_density(model, 2.0, 2.5) == 0.0


def test_student_t_integer_times_only(rng):
    model = SubordinatorModel.student_t(5.0)
    draws = marginal_sample(rng, model, 2.0, size=10)
    assert draws.shape == (10,)
    with pytest.raises(UnsupportedOperationError):
        marginal_sample(rng, model, 1.5)
    with pytest.raises(UnsupportedOperationError):
        laplace_exponent(model, 1.0)
    assert marginal_density(model, 1.0, 0.0) == pytest.approx(stats.t.pdf(0.0, 5.0))
    with pytest.raises(UnsupportedOperationError):
        marginal_density(model, 2.0, 0.0)


def test_path_is_nondecreasing_and_cadlag(rng, gamma_model):
    grid = np.linspace(0.1, 3.0, 30)
    path = path_sample(rng, gamma_model, grid)
    assert isinstance(path, SubordinatorPath)
    assert np.all(np.diff(path.values) >= 0)
    assert path(0.05) == 0.0
    assert path(grid[4] + 1e-9) == path.values[4]


def test_path_rejects_unsorted_grid(rng, gamma_model):
    with pytest.raises(ValueError):
        path_sample(rng, gamma_model, [1.0, 0.5])


def test_path_batch_shape_and_monotone(rng, gamma_model):
    paths = path_sample_batch(rng, gamma_model, [0.5, 1.0, 2.0], 100)
    assert paths.shape == (100, 3)
    assert np.all(np.diff(paths, axis=1) >= 0)


def test_gamma_density_and_laplace(gamma_model):
    assert marginal_density(gamma_model, 1.0, 0.3) == pytest.approx(stats.gamma.pdf(0.3, 4.0, scale=1.0 / 12.0))
    assert laplace_exponent(gamma_model, 2.0) == pytest.approx(4.0 * np.log1p(2.0 / 12.0))
    with pytest.raises(ValueError):
        marginal_density(gamma_model, 0.0, 1.0)
    with pytest.raises(ValueError):
        laplace_exponent(gamma_model, -1.0)
    assert levy_density(gamma_model, np.array([1.0]))[0] == pytest.approx(4.0 * np.exp(-12.0))
    assert not is_finite_activity(gamma_model)


def test_cpa_intensity_and_mean():
    model = cpa_from_gamma(4.0, 12.0, 1e-3)
    family = model.family
    assert family.intensity == pytest.approx(4.0 * exp1(0.012), rel=1e-3)
    assert family.mean(1.0) == pytest.approx(4.0 / 12.0, rel=5e-3)
    assert is_finite_activity(model)
    assert model.gamma_shape == 4.0


def test_cpa_laplace_converges_to_gamma(gamma_model):
    cpa = cpa_from_gamma(4.0, 12.0, 1e-4)
    u = np.array([0.5, 2.0, 10.0])
    np.testing.assert_allclose(laplace_exponent(cpa, u), laplace_exponent(gamma_model, u), rtol=1e-2)


def test_cpa_sample_mean(rng):
    model = cpa_from_gamma(4.0, 12.0, 1e-3)
    draws = marginal_sample(rng, model, 1.0, size=50_000)
    assert draws.mean() == pytest.approx(1.0 / 3.0, rel=0.02)


def test_cpa_rejects_bad_arguments():
    with pytest.raises(ValueError):
        cpa_build(lambda y: 1.0 / y, 0.0, 0.0)
    with pytest.raises(ValueError):
        cpa_build(lambda y: 1.0 / y, -1.0, 0.1)


def test_cpa_has_no_density():
    with pytest.raises(UnsupportedOperationError):
        marginal_density(cpa_from_gamma(1.0, 1.0, 0.1), 1.0, 0.5)


def test_zero_subordinator_is_deterministic(rng):
    model = zero_subordinator()
    np.testing.assert_array_equal(marginal_sample(rng, model, 2.0, size=5), np.zeros(5))
    assert laplace_exponent(model, 3.0) == 0.0
