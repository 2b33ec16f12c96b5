"""Tests for moment bounds, moment traces and the bootstrap moment test."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from subfield.core.models import Verdict
from subfield.field.models import FieldModel
from subfield.grf.models import CovarianceKind, CovarianceModel
from subfield.moments.bootstrap import bootstrap_moment_test
from subfield.moments.bounds import (
    bound_input_from_field,
    gaussian_abs_moment,
    moment_bound,
    moment_bound_for_field,
    tail_exponent,
)
from subfield.moments.models import BootstrapConfig, BootstrapStatistic, MomentBoundInput, MomentTrace
from subfield.moments.trace import abs_power, moment_trace
from subfield.stochastics.rng import RngStream
from subfield.subordinators.models import SubordinatorModel


def _field(kind, sub, **kwargs):
    return FieldModel(cov=CovarianceModel(kind=kind), subs=[sub, sub], horizon=[2.0, 2.0], **kwargs)


@pytest.fixture
def cfg():
    return BootstrapConfig(beta=0.5, n_resamples=1000, alpha=0.01)


def test_gaussian_abs_moment():
    assert gaussian_abs_moment(2.0, 3.0) == pytest.approx(9.0)
    assert gaussian_abs_moment(1.0, 1.0) == pytest.approx(math.sqrt(2.0 / math.pi))
    assert gaussian_abs_moment(4.0, 1.0) == pytest.approx(3.0)
    assert gaussian_abs_moment(2.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        gaussian_abs_moment(-1.0, 1.0)
    with pytest.raises(ValueError):
        gaussian_abs_moment(2.0, -1.0)


def test_moment_bound_formula():
    bound_input = MomentBoundInput(alphas=[[0.5, 0.0], [0.0, 1.0]], etas=[4.0, 6.0], coefficients=[1.0, 2.0])
    assert moment_bound(bound_input) == pytest.approx(5.0)
    assert moment_bound(MomentBoundInput(alphas=[[0.0, 0.0]], etas=[4.0, 4.0], coefficients=[1.0])) == math.inf
    assert moment_bound(MomentBoundInput(alphas=[[0.5, 0.5]], etas=[math.inf, math.inf], coefficients=[1.0])) == math.inf


def test_moment_bound_input_validation():
    with pytest.raises(ValidationError):
        MomentBoundInput(alphas=[[0.5]], etas=[4.0, 4.0], coefficients=[1.0])
    with pytest.raises(ValidationError):
        MomentBoundInput(alphas=[[0.5, 0.5]], etas=[4.0, 4.0], coefficients=[1.0, 1.0])
    with pytest.raises(ValidationError):
        MomentBoundInput(alphas=[[-0.5, 0.5]], etas=[4.0, 4.0], coefficients=[1.0])


def test_tail_exponents():
    assert tail_exponent(SubordinatorModel.student_t(3.0)) == 4.0
    assert tail_exponent(SubordinatorModel.gamma(1.0, 1.0)) == math.inf


def test_student_t_sheet_has_moments_below_six():
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.student_t(3.0), abs_mode=True)
    bound_input = bound_input_from_field(model)
    assert bound_input.alphas == [[0.5, 0.5]]
    assert moment_bound_for_field(model) == pytest.approx(6.0)


def test_sqrt_scaled_and_matern_bounds():
    t_sub = SubordinatorModel.student_t(3.0)
    sqrt_model = _field(CovarianceKind.SQRT_SCALED_STATIONARY, t_sub, abs_mode=True)
    assert moment_bound_for_field(sqrt_model) == pytest.approx(6.0)
    matern = _field(CovarianceKind.MATERN_STATIONARY, t_sub, abs_mode=True)
    assert moment_bound_for_field(matern) == math.inf
    gamma_sheet = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.gamma(1.0, 1.0))
    assert moment_bound_for_field(gamma_sheet) == math.inf


def test_abs_power():
    np.testing.assert_allclose(abs_power([-2.0, 0.0, 3.0], 2.0), [4.0, 0.0, 9.0])
    assert abs_power([1e200], 4.0)[0] == math.inf


def test_moment_trace_of_gaussian_field():
    model = _field(CovarianceKind.MATERN_STATIONARY, SubordinatorModel.gamma(4.0, 10.0))
    trace = moment_trace(RngStream(3), model, [1.0, 1.0], 2.0, [1000, 10_000], n_runs=3)
    assert isinstance(trace, MomentTrace)
    assert len(trace.estimates) == 3
    assert all(len(row) == 2 for row in trace.estimates)
    np.testing.assert_allclose(trace.final_estimates, 1.0, rtol=0.05)
    assert trace.relative_spread < 0.1


def test_moment_trace_independent_of_threads():
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.gamma(4.0, 10.0))
    single = moment_trace(RngStream(9), model, [1.0, 1.0], 4.0, [100, 500], n_runs=4, threads=1)
    multi = moment_trace(RngStream(9), model, [1.0, 1.0], 4.0, [100, 500], n_runs=4, threads=4)
    assert single.estimates == multi.estimates


def test_moment_trace_of_student_t_sheet_disagrees_beyond_moment_bound():
    # p = 8 exceeds the bound 6, so independent runs end far apart
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.student_t(3.0), abs_mode=True)
    ratios = [
        moment_trace(RngStream(seed), model, [1.0, 1.0], 8.0, [1000, 10_000, 100_000], n_runs=5).max_min_ratio
        for seed in (21, 22, 23)
    ]
    assert sum(ratio > 2.0 for ratio in ratios) >= 2


def test_moment_trace_validation():
    model = _field(CovarianceKind.BROWNIAN_SHEET, SubordinatorModel.gamma(4.0, 10.0))
    with pytest.raises(ValueError):
        moment_trace(RngStream(0), model, [1.0, 1.0], 0.5, [10, 20], 1)
    with pytest.raises(ValueError):
        moment_trace(RngStream(0), model, [1.0, 1.0], 2.0, [20, 10], 1)
    with pytest.raises(ValueError):
        moment_trace(RngStream(0), model, [1.0, 1.0], 2.0, [10, 20], 0)


def test_trace_summaries():
    trace = MomentTrace(p=2.0, point=[1.0, 1.0], sizes=[10], estimates=[[1.0], [3.0]])
    assert trace.relative_spread == pytest.approx(1.0)
    assert trace.max_min_ratio == pytest.approx(3.0)
    zeros = MomentTrace(p=2.0, point=[1.0, 1.0], sizes=[10], estimates=[[0.0], [0.0]])
    assert zeros.relative_spread == 0.0
    assert zeros.max_min_ratio == 1.0


def test_bootstrap_config():
    assert BootstrapConfig(beta=0.5).subsample_size(1_000_000) == 1000
    with pytest.raises(ValidationError):
        BootstrapConfig(n_resamples=100)
    with pytest.raises(ValidationError):
        BootstrapConfig(beta=1.0)


def test_bootstrap_accepts_normal_second_moment(cfg):
    samples = RngStream(1).generator.standard_normal(100_000)
    report = bootstrap_moment_test(RngStream(2), samples, 2.0, cfg)
    assert report.verdict == Verdict.ACCEPT
    assert report.test == "bootstrap_moment_folded"
    assert report.subsample_size == 316
    assert report.n_resamples == 1000
    assert report.threshold == pytest.approx(1.628 / math.sqrt(1000), rel=1e-3)


def test_bootstrap_rejects_missing_fourth_moment(cfg):
    samples = RngStream(3).generator.standard_t(3.0, size=100_000)
    assert bootstrap_moment_test(RngStream(4), samples, 4.0, cfg).verdict == Verdict.REJECT


def test_bootstrap_accepts_existing_moment_of_student_t(cfg):
    accepted = 0
    for seed in range(5):
        samples = RngStream(seed, 1).generator.standard_t(3.0, size=100_000)
        accepted += bootstrap_moment_test(RngStream(seed, 2), samples, 2.0, cfg).accepted
    assert accepted >= 4


def test_bootstrap_studentized_accepts_normal_second_moment():
    cfg = BootstrapConfig(beta=0.5, n_resamples=1000, statistic=BootstrapStatistic.STUDENTIZED)
    samples = RngStream(5).generator.standard_normal(1_000_000)
    report = bootstrap_moment_test(RngStream(6), samples, 2.0, cfg)
    assert report.test == "bootstrap_moment_studentized"
    assert report.subsample_size == 1000
    assert report.verdict == Verdict.ACCEPT


def test_bootstrap_studentized_rejects_missing_fourth_moment():
    cfg = BootstrapConfig(beta=0.5, n_resamples=1000, statistic=BootstrapStatistic.STUDENTIZED)
    samples = RngStream(7).generator.standard_t(3.0, size=100_000)
    report = bootstrap_moment_test(RngStream(8), samples, 4.0, cfg)
    assert report.verdict == Verdict.REJECT
    assert report.statistic > report.threshold


def test_bootstrap_degenerate_samples(cfg):
    zeros = np.zeros(1000)
    assert bootstrap_moment_test(RngStream(0), zeros, 2.0, cfg).verdict == Verdict.INCONCLUSIVE
    sparse = np.zeros(1000)
    sparse[:5] = 1.0
    studentized = BootstrapConfig(beta=0.5, n_resamples=1000, statistic=BootstrapStatistic.STUDENTIZED)
    report = bootstrap_moment_test(RngStream(0), sparse, 2.0, studentized)
    assert report.verdict == Verdict.INCONCLUSIVE
    assert report.note == "degenerate resamples"


def test_bootstrap_power_overflow(cfg):
    samples = np.full(1000, 1e200)
    report = bootstrap_moment_test(RngStream(0), samples, 4.0, cfg)
    assert report.verdict == Verdict.REJECT
    assert report.note == "power overflow"


def test_bootstrap_validation(cfg):
    with pytest.raises(ValueError):
        bootstrap_moment_test(RngStream(0), np.ones(999), 2.0, cfg)
    with pytest.raises(ValueError):
        bootstrap_moment_test(RngStream(0), np.ones(1000), 0.0, cfg)
    with pytest.raises(ValueError):
        bootstrap_moment_test(RngStream(0), np.ones(1000), 2.0, BootstrapConfig(beta=0.3, n_resamples=1000))


def test_bootstrap_independent_of_threads(cfg):
    samples = RngStream(7).generator.standard_normal(10_000)
    single = bootstrap_moment_test(RngStream(8), samples, 2.0, cfg, threads=1)
    multi = bootstrap_moment_test(RngStream(8), samples, 2.0, cfg, threads=4)
    assert single.statistic == multi.statistic
    assert single.verdict == multi.verdict
