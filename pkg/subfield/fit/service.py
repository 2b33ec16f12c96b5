"""Fitting workflow: building Gamma x Gamma targets, running LM and scoring the match."""

import logging
from typing import Optional, Sequence

import numpy as np

from subfield.core.config import get_settings
from subfield.fit.levenberg_marquardt import lm_minimize
from subfield.fit.models import FitMode, FitProblem, FitResult
from subfield.fit.residuals import (
    gamma_pair_charfn,
    log_targets,
    model_curves,
    project_shapes,
    residual_charfn,
    residual_density,
)
from subfield.spectral.inversion import gil_pelaez_pdf, inversion_grid, tabulate_cdf

logger = logging.getLogger(__name__)

DEFAULT_POINTS = ((0.1, 0.1), (0.1, 0.8), (0.7, 0.2), (1.0, 1.0))


def build_gamma_problem(
    points: Sequence[Sequence[float]],
    theta_true,
    mode: FitMode,
    theta0,
    xi_nodes: Optional[int] = None,
    xi_max: Optional[float] = None,
    z_nodes: Optional[int] = None,
    z_quantile: Optional[float] = None,
) -> FitProblem:
    """Targets generated from the true parameters at each point.

    Charfn mode evaluates Re phi on an even frequency grid [0, xi_max]. Density
    mode inverts the true characteristic function and places ``z_nodes`` nodes
    between its ``z_quantile`` and ``1 - z_quantile`` quantiles.
    """
    settings = get_settings()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    mode = FitMode(mode)
    grids, targets, cutoffs = [], [], []
    for point in pts:
        cf = gamma_pair_charfn(theta_true, point)
        if mode == FitMode.CHARFN:
            xi = np.linspace(0.0, xi_max or settings.fit_xi_max, xi_nodes or settings.fit_xi_nodes)
            grids.append(xi)
            targets.append(cf.eval(xi).real)
        else:
            q = settings.fit_z_quantile if z_quantile is None else z_quantile
            inversion = inversion_grid(cf)
            table = tabulate_cdf(cf, grid=inversion)
            lo, hi = table.quantile([q, 1.0 - q])
            z = np.linspace(lo, hi, z_nodes or settings.fit_z_nodes)
            grids.append(z)
            targets.append(np.asarray(gil_pelaez_pdf(cf, z, inversion)))
            cutoffs.append(inversion.xi_max)
    logger.info(f"Built {mode.value} fit problem at {len(pts)} points")
    return FitProblem(
        points=pts,
        mode=mode,
        grids=grids,
        targets=targets,
        theta0=np.asarray(theta0, dtype=float),
        xi_max=cutoffs if mode == FitMode.DENSITY else None,
    )


def _project_rates(problem: FitProblem, budget: int):
    """Fits (b1, b2, sigma) on -log Re phi with the shapes eliminated by nonnegative least squares.

    Returns:
        (theta, n_iterations) with theta assembled from the fitted rates and
        their projected shapes.
    """
    log_target, mask = log_targets(problem)
    if budget <= 0 or not np.any(mask):
        return problem.theta0, 0
    rates0 = problem.theta0[[1, 3, 4]]
    warm = lm_minimize(lambda rates: project_shapes(rates, problem, log_target, mask)[0], rates0, budget)
    b1, b2, sigma = warm.theta_hat
    _, (a1, a2) = project_shapes(warm.theta_hat, problem, log_target, mask)
    logger.debug(f"Shape projection: ||r_log||={warm.residual_norm:.4e} after {warm.n_iterations} steps")
    return np.array([a1, b1, a2, b2, sigma]), warm.n_iterations


def _fit_charfn(problem: FitProblem, budget: int) -> FitResult:
    def residual(theta):
        return residual_charfn(theta, problem)

    start_norm = float(np.linalg.norm(residual(problem.theta0)))
    theta, used = _project_rates(problem, budget)
    if not np.linalg.norm(residual(theta)) < start_norm:
        theta = problem.theta0
    polish = lm_minimize(residual, theta, max(budget - used, 0))
    return FitResult(
        theta_hat=polish.theta_hat,
        residual_norm=polish.residual_norm,
        n_iterations=used + polish.n_iterations,
        converged=polish.converged,
        trajectory=[start_norm] + polish.trajectory,
    )


def fit(problem: FitProblem, max_iter: Optional[int] = None) -> FitResult:
    """Runs LM from ``problem.theta0`` with the mode's default iteration budget.

    Charfn fits first match -log Re phi over the rates and sigma, with the
    shapes solved exactly for each trial, then polish on Re phi itself with
    the remaining budget. ``n_iterations`` counts the steps of both stages.
    """
    settings = get_settings()
    if problem.mode == FitMode.CHARFN:
        budget = settings.fit_iterations_charfn if max_iter is None else max_iter
        result = _fit_charfn(problem, budget)
    else:
        budget = settings.fit_iterations_density if max_iter is None else max_iter
        result = lm_minimize(lambda theta: residual_density(theta, problem), problem.theta0, budget)
    logger.info(
        f"{problem.mode.value} fit from {problem.theta0.tolist()}: ||r||={result.residual_norm:.4e} "
        f"after {result.n_iterations} steps"
    )
    return result


def fit_sup_error(result: FitResult, problem: FitProblem) -> float:
    """max |model - target| over all points and grid nodes at the fitted parameters."""
    curves = model_curves(np.asarray(result.theta_hat), problem)
    return float(max(np.max(np.abs(m - t)) for m, t in zip(curves, problem.targets)))
