"""Experiment runners behind the ``subfield`` command.

Each runner takes the resolved config, an artifact writer, the root random
stream and the thread cap, writes its CSV tables and returns a JSON-ready
summary for the manifest. Runners use fixed substream indices so artifacts
depend only on the seed.
"""

import logging
from typing import Any, Callable, Dict

import numpy as np

from subfield.cli.artifacts import ArtifactWriter
from subfield.cli.config_file import ExperimentConfig, ExperimentName
from subfield.core.exceptions import UnsupportedOperationError
from subfield.covariance.analytic import cov_analytic
from subfield.covariance.models import QuadratureSpec
from subfield.covariance.monte_carlo import cov_mc_estimate, rmse_convergence_study
from subfield.field.models import FieldModel
from subfield.field.sampling import sample_grid, sample_pointwise
from subfield.fit.models import PARAMETER_NAMES, FitMode
from subfield.fit.residuals import model_curves
from subfield.fit.service import build_gamma_problem, fit, fit_sup_error
from subfield.moments.bootstrap import bootstrap_moment_test
from subfield.moments.bounds import moment_bound_for_field
from subfield.moments.models import BootstrapConfig
from subfield.moments.trace import moment_trace
from subfield.spectral.charfn import charfn_empirical, charfn_from_nusharp, charfn_levy_khinchin, charfn_mixture
from subfield.spectral.cpa import cpa_transformed_sample, skewness
from subfield.spectral.inversion import inversion_grid, tabulate_cdf
from subfield.spectral.ks import ks_test
from subfield.spectral.models import CharFn
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentConfig, ArtifactWriter, RngStream, int], Dict[str, Any]]


def reference_charfn(model: FieldModel, point, rng: RngStream, n_mixture: int) -> CharFn:
    """Closed form where it exists, otherwise the Monte Carlo mixture representation."""
    try:
        return charfn_levy_khinchin(model, point)
    except UnsupportedOperationError:
        logger.info(f"No closed-form characteristic function at {point}; using a {n_mixture}-draw mixture")
        return charfn_mixture(model, point, n_mixture, rng)


def run_sample_grid(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    realization = sample_grid(rng, config.model, params.n_per_axis)
    mesh = np.meshgrid(*realization.axes, indexing="ij")
    coords = [m.reshape(-1) for m in mesh]
    values = realization.values.reshape(-1)
    header = [f"x{k + 1}" for k in range(len(coords))] + ["value"]
    writer.write_csv("grid.csv", header, (tuple(c[i] for c in coords) + (values[i],) for i in range(values.size)))
    return {"n_points": int(values.size), "sample_mean": float(values.mean()), "sample_var": float(values.var())}


def run_pointwise_dist(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    sample_rows, table_rows, ks_rows = [], [], []
    verdicts = []
    for j, point in enumerate(params.points):
        stream = rng.substream(j)
        samples = sample_pointwise(stream.substream(0), config.model, point, params.n_samples)
        cf = reference_charfn(config.model, point, stream.substream(1), params.n_mixture)
        table = tabulate_cdf(cf)
        report = ks_test(samples, table, alpha=params.alpha, seed=config.seed)
        verdicts.append(report.verdict.value)
        sample_rows.extend((j, v) for v in samples)
        table_rows.extend(zip([j] * table.z.size, table.z, table.cdf, table.pdf))
        ks_rows.append((j, *point, report.statistic, report.threshold, report.alpha, report.verdict, report.n_samples))
    writer.write_csv("samples.csv", ["point_index", "value"], sample_rows)
    writer.write_csv("cdf.csv", ["point_index", "z", "cdf", "pdf"], table_rows)
    dims = [f"x{k + 1}" for k in range(config.model.dim)]
    writer.write_csv("ks.csv", ["point_index", *dims, "statistic", "threshold", "alpha", "verdict", "n"], ks_rows)
    return {"verdicts": verdicts}


def run_charfn(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    xi = np.linspace(params.xi_min, params.xi_max, params.n_xi)
    rows = []
    max_gap = 0.0
    for j, point in enumerate(params.points):
        stream = rng.substream(j)
        samples = sample_pointwise(stream.substream(0), config.model, point, params.n_samples)
        empirical = charfn_empirical(samples, point).eval(xi)
        reference = reference_charfn(config.model, point, stream.substream(1), params.n_samples).eval(xi)
        nusharp = None
        if params.include_nusharp:
            try:
                nusharp = charfn_from_nusharp(config.model, point).eval(xi)
            except UnsupportedOperationError:
                logger.info("nu# characteristic function not available for this model")
        max_gap = max(max_gap, float(np.max(np.abs(empirical.real - reference.real))))
        for k in range(xi.size):
            rows.append(
                (
                    j,
                    xi[k],
                    reference[k].real,
                    reference[k].imag,
                    empirical[k].real,
                    empirical[k].imag,
                    None if nusharp is None else nusharp[k].real,
                )
            )
    header = ["point_index", "xi", "re_reference", "im_reference", "re_empirical", "im_empirical", "re_nusharp"]
    writer.write_csv("charfn.csv", header, rows)
    return {"max_abs_re_gap": max_gap}


def run_density(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    rows = []
    for j, point in enumerate(params.points):
        cf = reference_charfn(config.model, point, rng.substream(j), params.n_mixture)
        grid = inversion_grid(cf)
        table = tabulate_cdf(cf, n_nodes=params.n_nodes, grid=grid)
        rows.extend(zip([j] * table.z.size, table.z, table.pdf, table.cdf))
    writer.write_csv("density.csv", ["point_index", "z", "pdf", "cdf"], rows)
    return {"n_points": len(params.points)}


def _quadrature_spec(params) -> QuadratureSpec:
    overrides = {
        key: getattr(params, key)
        for key in ("nodes_per_axis", "nodes_per_axis_4d")
        if getattr(params, key, None) is not None
    }
    return QuadratureSpec(**overrides)


def run_covariance(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    spec = _quadrature_spec(params)
    rows = []
    for j, (p, q) in enumerate(params.pairs):
        analytic = cov_analytic(config.model, p, q, spec)
        estimate = cov_mc_estimate(rng.substream(j), config.model, p, q, params.n_samples)
        rows.append((j, *p, *q, analytic, estimate, params.n_samples))
    dims = config.model.dim
    header = ["pair_index", *[f"p{k + 1}" for k in range(dims)], *[f"q{k + 1}" for k in range(dims)]]
    writer.write_csv("covariance.csv", header + ["analytic", "monte_carlo", "M"], rows)
    return {"max_abs_difference": max(abs(r[-3] - r[-2]) for r in rows)}


def run_rmse_study(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    study = rmse_convergence_study(rng, config.model, params.p, params.q, params.sizes, params.n_repeats, threads=threads)
    writer.write_csv("rmse.csv", ["M", "rmse"], zip(study.sample_sizes, study.rmse))
    return {"reference": study.reference, "slope": study.slope, "n_repeats": study.n_repeats}


def run_fit(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    problem = build_gamma_problem(params.points, params.theta_true, params.mode, params.theta0)
    result = fit(problem, params.max_iter)
    fitted = model_curves(np.asarray(result.theta_hat), problem)
    writer.write_csv("fit_trajectory.csv", ["step", "residual_norm"], enumerate(result.trajectory))
    curve_rows = []
    for j, (grid, target, curve) in enumerate(zip(problem.grids, problem.targets, fitted)):
        curve_rows.extend(zip([j] * grid.size, grid, target, curve))
    grid_name = "xi" if problem.mode == FitMode.CHARFN else "z"
    writer.write_csv("fit_curves.csv", ["point_index", grid_name, "target", "fitted"], curve_rows)
    writer.write_csv(
        "fit_parameters.csv",
        ["name", "theta0", "theta_hat", "theta_true"],
        zip(PARAMETER_NAMES, params.theta0, result.theta_hat, params.theta_true),
    )
    return {
        "sup_error": fit_sup_error(result, problem),
        "residual_norm": result.residual_norm,
        "converged": result.converged,
        "n_iterations": result.n_iterations,
    }


def run_moment_trace(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    rows = []
    spreads = {}
    for i, p in enumerate(params.p_values):
        trace = moment_trace(rng.substream(i), config.model, params.point, p, params.sizes, params.n_runs, threads)
        spreads[format(p, "g")] = trace.relative_spread
        for run, estimates in enumerate(trace.estimates):
            rows.extend((p, run, m, e) for m, e in zip(trace.sizes, estimates))
    writer.write_csv("moment_trace.csv", ["p", "run", "M", "estimate"], rows)
    return {"relative_spread": spreads}


def run_moment_test(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    overrides = {k: getattr(params, k) for k in ("beta", "n_resamples") if getattr(params, k) is not None}
    cfg = BootstrapConfig(alpha=params.alpha, statistic=params.statistic, **overrides)
    bound = moment_bound_for_field(config.model)
    samples = sample_pointwise(rng.substream(0), config.model, params.point, params.n_samples)
    rows = []
    verdicts = {}
    for i, p in enumerate(params.p_values):
        report = bootstrap_moment_test(rng.substream(i + 1), samples, p, cfg, threads)
        verdicts[format(p, "g")] = report.verdict.value
        rows.append((p, report.statistic, report.threshold, report.verdict, report.subsample_size, bound))
    writer.write_csv("moment_test.csv", ["p", "statistic", "threshold", "verdict", "m", "moment_bound"], rows)
    return {"moment_bound": bound if np.isfinite(bound) else "inf", "verdicts": verdicts}


def run_cpa_skew(config: ExperimentConfig, writer: ArtifactWriter, rng: RngStream, threads: int):
    params = config.typed_params
    cpa = cpa_transformed_sample(rng.substream(0), config.model, params.point, params.n_samples, params.eps)
    field = sample_pointwise(rng.substream(1), config.model, params.point, params.n_samples)
    rows = [
        ("cpa", skewness(cpa), float(np.mean(cpa)), float(np.var(cpa))),
        ("field", skewness(field), float(np.mean(field)), float(np.var(field))),
    ]
    writer.write_csv("cpa_skew.csv", ["source", "skewness", "mean", "variance"], rows)
    writer.write_csv(
        "cpa_samples.csv",
        ["source", "value"],
        [("cpa", v) for v in cpa] + [("field", v) for v in field],
    )
    return {"cpa_skewness": rows[0][1], "field_skewness": rows[1][1]}


EXPERIMENTS: Dict[ExperimentName, Runner] = {
    ExperimentName.SAMPLE_GRID: run_sample_grid,
    ExperimentName.POINTWISE_DIST: run_pointwise_dist,
    ExperimentName.CHARFN: run_charfn,
    ExperimentName.DENSITY: run_density,
    ExperimentName.COVARIANCE: run_covariance,
    ExperimentName.RMSE_STUDY: run_rmse_study,
    ExperimentName.FIT: run_fit,
    ExperimentName.MOMENT_TRACE: run_moment_trace,
    ExperimentName.MOMENT_TEST: run_moment_test,
    ExperimentName.CPA_SKEW: run_cpa_skew,
}
