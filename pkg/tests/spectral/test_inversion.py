"""Tests for Gil-Pelaez inversion and the Kolmogorov-Smirnov tests."""

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import trapezoid
from scipy.special import ndtr

from subfield.core.models import Verdict
from subfield.field.models import FieldModel
from subfield.grf.models import CovarianceKind, CovarianceModel
from subfield.spectral.charfn import charfn_levy_khinchin, gaussian_charfn
from subfield.spectral.inversion import (
    find_xi_max,
    gil_pelaez_cdf,
    gil_pelaez_pdf,
    inversion_grid,
    sum_representation_density,
    support_bound,
    tabulate_cdf,
)
from subfield.spectral.ks import critical_value, ks_statistic, ks_test, ks_two_sample
from subfield.stochastics.rng import RngStream
from subfield.subordinators.models import SubordinatorModel

Z = np.linspace(-4.0, 4.0, 33)


@pytest.fixture
def normal_cf():
    return gaussian_charfn(1.0)


def test_find_xi_max_gaussian(normal_cf):
    xi_max = find_xi_max(normal_cf, 1e-8, 1e4)
    assert xi_max == pytest.approx(np.sqrt(2.0 * np.log(1e8)), rel=1e-6)
    assert find_xi_max(gaussian_charfn(1e-10), 1e-8, 100.0) == 100.0


def test_grid_layout(normal_cf):
    grid = inversion_grid(normal_cf, xi_max=2.0, n_nodes=8)
    assert grid.xi.shape == grid.weights.shape == grid.values.shape == (9,)
    assert grid.xi[0] == pytest.approx(0.125)
    assert grid.weights.sum() == pytest.approx(2.0)


def test_gaussian_pdf_and_cdf(normal_cf):
    grid = inversion_grid(normal_cf)
    np.testing.assert_allclose(gil_pelaez_pdf(normal_cf, Z, grid), stats.norm.pdf(Z), atol=1e-6)
    np.testing.assert_allclose(gil_pelaez_cdf(normal_cf, Z, grid), stats.norm.cdf(Z), atol=1e-5)
    assert isinstance(gil_pelaez_pdf(normal_cf, 0.0, grid), float)


def test_support_bound_and_table(normal_cf):
    bound = support_bound(normal_cf, 1e-6)
    assert bound >= stats.norm.ppf(1.0 - 1e-6)
    table = tabulate_cdf(normal_cf, n_nodes=512)
    assert np.all(np.diff(table.cdf) >= 0)
    assert table(0.0) == pytest.approx(0.5, abs=1e-5)
    assert table(-1e6) == 0.0
    assert table(1e6) == 1.0
    assert table.quantile(0.975) == pytest.approx(1.96, abs=0.02)


def test_sum_representation_density_integrates_to_one():
    sub = SubordinatorModel.gamma(4.0, 12.0)
    model = FieldModel(
        cov=CovarianceModel(kind=CovarianceKind.SQRT_SCALED_STATIONARY, matern_sigma2=4.0),
        subs=[sub, sub],
        horizon=[1.0, 1.0],
    )
    z = np.linspace(-8.0, 8.0, 801)
    density = sum_representation_density(model, [1.0, 1.0], z)
    assert np.all(density >= 0)
    assert trapezoid(density, z) == pytest.approx(1.0, abs=1e-3)
    cf = charfn_levy_khinchin(model, [1.0, 1.0])
    np.testing.assert_allclose(density[400], gil_pelaez_pdf(cf, 0.0), rtol=1e-10)


def test_critical_values():
    assert critical_value(0.05) == pytest.approx(1.358, abs=1e-3)
    assert critical_value(0.01) == pytest.approx(1.628, abs=1e-3)
    with pytest.raises(ValueError):
        critical_value(1.0)


def test_ks_statistic_of_perfect_grid():
    n = 100
    samples = stats.norm.ppf((np.arange(n) + 0.5) / n)
    assert ks_statistic(samples, ndtr) == pytest.approx(0.5 / n)


def test_ks_accepts_correct_law_and_rejects_shift():
    samples = RngStream(5).generator.standard_normal(10_000)
    report = ks_test(samples, ndtr, alpha=0.01, seed=5)
    assert report.verdict == Verdict.ACCEPT
    assert report.accepted
    assert report.n_samples == 10_000
    assert report.seed == 5
    assert ks_test(samples + 0.1, ndtr, alpha=0.01).verdict == Verdict.REJECT


def test_ks_requires_ten_samples():
    with pytest.raises(ValueError):
        ks_test(np.zeros(9), ndtr)


def test_ks_two_sample():
    gen = RngStream(6).generator
    a, b = gen.standard_normal(5000), gen.standard_normal(5000)
    assert ks_two_sample(a, b).verdict == Verdict.ACCEPT
    assert ks_two_sample(a, b + 0.5).verdict == Verdict.REJECT
