"""Tests for analytic and Monte Carlo covariance of subordinated fields."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from subfield.core.exceptions import UnsupportedOperationError
from subfield.covariance.analytic import (
    cov_analytic,
    cov_nonstationary_analytic,
    cov_objective,
    cov_stationary_analytic,
    joint_increment_density,
)
from subfield.covariance.models import ConvergenceStudy, QuadratureSpec
from subfield.covariance.monte_carlo import cov_mc_estimate, loglog_slope, rmse_convergence_study
from subfield.field.models import FieldModel
from subfield.grf.models import CovarianceKind, CovarianceModel
from subfield.stochastics.rng import RngStream
from subfield.subordinators.models import SubordinatorModel


def _field(kind, sub, horizon=(4.0, 4.0), **kwargs):
    cov = CovarianceModel(kind=kind, matern_nu=1.5, matern_r=1.0, matern_sigma2=1.0)
    return FieldModel(cov=cov, subs=[sub, sub], horizon=list(horizon), **kwargs)


@pytest.fixture
def sheet():
    return _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.gamma(5.0, 1.0))


@pytest.fixture
def matern():
    return _field(CovarianceKind.MATERN_STATIONARY, SubordinatorModel.gamma(4.0, 10.0))


def test_sheet_variance(sheet):
    # E l_1(3) E l_2(3) with l(3) ~ Gamma(15, 1)
    assert cov_analytic(sheet, [3.0, 3.0], [3.0, 3.0]) == pytest.approx(225.0, rel=1e-3)


def test_sheet_covariance_four_variables(sheet):
    # E l_1(1) E l_2(2) = 5 * 10
    assert cov_analytic(sheet, [1.0, 2.0], [3.0, 3.0]) == pytest.approx(50.0, rel=1e-3)


def test_sheet_covariance_three_variables(sheet):
    # E l_1(1) E l_2(3) = 5 * 15
    assert cov_analytic(sheet, [1.0, 3.0], [2.0, 3.0]) == pytest.approx(75.0, rel=1e-3)


def test_symmetry(matern, sheet):
    for model in (matern, sheet):
        assert cov_analytic(model, [1.0, 2.0], [3.0, 0.5]) == pytest.approx(
            cov_analytic(model, [3.0, 0.5], [1.0, 2.0]), rel=1e-12
        )


def test_stationary_at_same_point_is_variance(matern):
    assert cov_stationary_analytic(matern, [2.0, 2.0], [2.0, 2.0]) == 1.0


def test_stationary_matches_general_formula(matern):
    p, q = [1.0, 1.0], [2.0, 1.5]
    assert cov_stationary_analytic(matern, p, q) == pytest.approx(cov_nonstationary_analytic(matern, p, q), rel=5e-3)


def test_stationary_depends_on_gaps_only(matern):
    a = cov_stationary_analytic(matern, [1.0, 1.0], [2.0, 1.5])
    b = cov_stationary_analytic(matern, [2.0, 2.5], [3.0, 3.0])
    assert a == pytest.approx(b, rel=1e-12)


def test_stationary_rejects_other_models(sheet):
    with pytest.raises(UnsupportedOperationError):
        cov_stationary_analytic(sheet, [1.0, 1.0], [2.0, 2.0])
    student = _field(CovarianceKind.MATERN_STATIONARY, SubordinatorModel.student_t(4.0), abs_mode=True)
    with pytest.raises(UnsupportedOperationError):
        cov_stationary_analytic(student, [1.0, 1.0], [1.0, 1.0])


def test_only_planar_fields():
    sub = SubordinatorModel.gamma(1.0, 1.0)
    model = FieldModel(
        cov=CovarianceModel(kind=CovarianceKind.BROWNIAN_SHEET, dim=3),
        subs=[sub] * 3,
        horizon=[1.0, 1.0, 1.0],
    )
    with pytest.raises(UnsupportedOperationError):
        cov_analytic(model, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0])


def test_poisson_sheet_uses_atoms():
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.poisson(2.0))
    # E N(1) E N(1) = 4 for the variance at (1, 1)
    assert cov_analytic(model, [1.0, 1.0], [1.0, 1.0]) == pytest.approx(4.0, rel=1e-6)


def test_small_shape_gamma_cell_rule():
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.gamma(0.5, 2.0))
    # shape 0.5 < 1 at t = 1: mean 0.25 per axis
    assert cov_analytic(model, [1.0, 1.0], [1.0, 1.0]) == pytest.approx(0.0625, rel=1e-3)


def test_joint_increment_density():
    sub = SubordinatorModel.gamma(2.0, 3.0)
    value = joint_increment_density(sub, 1.0, 2.0, 0.5, 1.2)
    expected = stats.gamma.pdf(0.5, 2.0, scale=1 / 3.0) * stats.gamma.pdf(0.7, 2.0, scale=1 / 3.0)
    assert value == pytest.approx(expected)
    assert joint_increment_density(sub, 2.0, 1.0, 0.5, 1.2) == pytest.approx(expected)
    assert joint_increment_density(sub, 1.0, 2.0, 1.2, 0.5) == 0.0
    with pytest.raises(ValueError):
        joint_increment_density(sub, 1.0, 1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        joint_increment_density(sub, 0.0, 1.0, 0.5, 1.0)


def test_objective_vanishes_at_analytic_matrix(matern):
    points = np.array([[1.0, 1.0], [2.0, 1.5]])
    matrix = np.array([[cov_analytic(matern, a, b) for b in points] for a in points])
    assert cov_objective(matern, points, matrix) == pytest.approx(0.0, abs=1e-20)
    shifted = matrix + np.array([[0.0, 0.1], [0.1, 0.0]])
    assert cov_objective(matern, points, shifted) == pytest.approx(0.02)
    with pytest.raises(ValueError):
        cov_objective(matern, points, np.eye(3))


def test_mc_estimate_agrees_with_analytic(matern):
    p, q, M = [1.0, 1.0], [2.0, 1.5], 100_000
    estimate = cov_mc_estimate(RngStream(31), matern, p, q, M)
    assert abs(estimate - cov_analytic(matern, p, q)) < 4.0 * math.sqrt(3.0 / M)


def test_mc_estimate_rejects_empty(matern):
    with pytest.raises(ValueError):
        cov_mc_estimate(RngStream(0), matern, [1.0, 1.0], [1.0, 1.0], 0)


def test_loglog_slope():
    sizes = [100, 400, 1600]
    assert loglog_slope(sizes, [1.0 / math.sqrt(m) for m in sizes]) == pytest.approx(-0.5)
    assert loglog_slope([100], [0.1]) is None
    assert loglog_slope(sizes, [0.1, 0.0, 0.1]) is None


def test_rmse_study_decays_at_monte_carlo_rate(matern):
    p, q = [1.0, 1.0], [2.0, 1.5]
    reference = cov_analytic(matern, p, q)
    study = rmse_convergence_study(RngStream(41), matern, p, q, [100, 400, 1600], 30, reference=reference)
    assert isinstance(study, ConvergenceStudy)
    assert study.reference == reference
    assert -0.8 <= study.slope <= -0.2


def test_rmse_study_independent_of_threads(matern):
    kwargs = dict(p=[1.0, 1.0], q=[2.0, 1.5], sizes=[50, 100], n_repeats=4, reference=0.3)
    single = rmse_convergence_study(RngStream(7), matern, threads=1, **kwargs)
    multi = rmse_convergence_study(RngStream(7), matern, threads=3, **kwargs)
    assert single.rmse == multi.rmse


def test_rmse_study_validation(matern):
    with pytest.raises(ValueError):
        rmse_convergence_study(RngStream(0), matern, [1.0, 1.0], [1.0, 1.0], [100, 100], 2, reference=1.0)
    single = rmse_convergence_study(RngStream(0), matern, [1.0, 1.0], [1.0, 1.0], [10, 20], 1, reference=1.0)
    assert single.slope is None


def test_quadrature_spec_validation():
    assert QuadratureSpec().nodes_per_axis == 256
    with pytest.raises(ValidationError):
        QuadratureSpec(truncation_quantile=0.99)
    with pytest.raises(ValidationError):
        QuadratureSpec(nodes_per_axis=8)
    with pytest.raises(ValidationError):
        ConvergenceStudy(sample_sizes=[1, 2], rmse=[0.1], n_repeats=1, reference=0.0)
