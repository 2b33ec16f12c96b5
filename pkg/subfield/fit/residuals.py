"""Residuals of the Gamma x Gamma sqrt-scaled field against pointwise targets."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.optimize import nnls

from subfield.field.models import FieldModel
from subfield.fit.models import FitMode, FitProblem
from subfield.grf.models import CovarianceKind, CovarianceModel
from subfield.spectral.charfn import charfn_levy_khinchin
from subfield.spectral.inversion import gil_pelaez_pdf, inversion_grid
from subfield.spectral.models import CharFn, Provenance
from subfield.subordinators.models import SubordinatorModel
from subfield.subordinators.service import laplace_exponent, zero_subordinator

# keeps log1p(u / b) finite at b = 0; a = 0 still switches the axis off
RATE_FLOOR = 1e-12


@lru_cache(maxsize=1)
def _idle_axis() -> SubordinatorModel:
    return zero_subordinator()


def _axis_subordinator(shape: float, rate: float) -> SubordinatorModel:
    if shape <= 0:
        return _idle_axis()
    return SubordinatorModel.gamma(shape, rate + RATE_FLOOR)


def gamma_pair_charfn(theta, point) -> CharFn:
    """Characteristic function at ``point`` for theta = (a1, b1, a2, b2, sigma).

    The field is sqrt-scaled stationary with variance sigma^2, subordinated by
    Gamma(a1, b1) and Gamma(a2, b2). Zero parameters stay admissible: an axis
    with a_k = 0 carries the zero subordinator, and sigma = 0 or a1 = a2 = 0
    gives the deterministic zero field (phi = 1).
    """
    a1, b1, a2, b2, sigma = (float(v) for v in theta)
    x1, x2 = (float(v) for v in point)
    sigma2 = sigma * sigma
    if sigma2 == 0.0 or (a1 <= 0 and a2 <= 0):
        return CharFn(
            func=lambda xi: np.ones(xi.shape, dtype=complex),
            point=(x1, x2),
            provenance=Provenance.CLOSED_FORM,
            note="deterministic zero field",
        )
    model = FieldModel(
        cov=CovarianceModel(kind=CovarianceKind.SQRT_SCALED_STATIONARY, matern_sigma2=sigma2),
        subs=[_axis_subordinator(a1, b1), _axis_subordinator(a2, b2)],
        horizon=[max(x1, 1.0), max(x2, 1.0)],
    )
    return charfn_levy_khinchin(model, (x1, x2))


def model_curves(theta, problem: FitProblem):
    """Model values on each point's grid: Re phi (charfn mode) or the inverted density."""
    curves = []
    for j, (point, grid) in enumerate(zip(problem.points, problem.grids)):
        cf = gamma_pair_charfn(theta, point)
        if problem.mode == FitMode.CHARFN:
            curves.append(cf.eval(grid).real)
        else:
            inversion = inversion_grid(cf, xi_max=problem.xi_max[j])
            curves.append(np.asarray(gil_pelaez_pdf(cf, grid, inversion)))
    return curves


def residual_charfn(theta, problem: FitProblem) -> np.ndarray:
    """Concatenated Re phi_model - Re phi_target over all points and frequencies."""
    if problem.mode != FitMode.CHARFN:
        raise ValueError("residual_charfn needs a charfn-mode problem")
    return np.concatenate([m - t for m, t in zip(model_curves(theta, problem), problem.targets)])


def residual_density(theta, problem: FitProblem) -> np.ndarray:
    """Concatenated f_model - f_target; each evaluation inverts one characteristic function per point."""
    if problem.mode != FitMode.DENSITY:
        raise ValueError("residual_density needs a density-mode problem")
    return np.concatenate([m - t for m, t in zip(model_curves(theta, problem), problem.targets)])


def shape_basis(rates, problem: FitProblem) -> np.ndarray:
    """Columns of -log phi per unit shape: x_k log(1 + sigma^2 xi^2 / (2 b_k)), stacked over points.

    ``rates`` is (b1, b2, sigma). For fixed rates -log phi is linear in the
    shapes (a1, a2), which is what :func:`project_shapes` exploits.
    """
    b1, b2, sigma = (float(v) for v in rates)
    unit_axes = [SubordinatorModel.gamma(1.0, b + RATE_FLOOR) for b in (b1, b2)]
    blocks = []
    for point, grid in zip(problem.points, problem.grids):
        u = 0.5 * sigma * sigma * np.asarray(grid, dtype=float) ** 2
        blocks.append(np.column_stack([x * laplace_exponent(sub, u) for x, sub in zip(point, unit_axes)]))
    return np.vstack(blocks)


def log_targets(problem: FitProblem) -> Tuple[np.ndarray, np.ndarray]:
    """(-log of the positive charfn targets, mask of the nodes they come from)."""
    if problem.mode != FitMode.CHARFN:
        raise ValueError("log_targets needs a charfn-mode problem")
    targets = np.concatenate(problem.targets)
    mask = np.isfinite(targets) & (targets > 0)
    return -np.log(targets[mask]), mask


def project_shapes(rates, problem: FitProblem, log_target: np.ndarray, mask: np.ndarray):
    """Best nonnegative shapes for fixed rates, and the log-space residual they leave.

    Returns:
        (residual, shapes) where residual = basis @ shapes + log(target).
    """
    basis = shape_basis(rates, problem)[mask]
    shapes, _ = nnls(basis, log_target)
    return basis @ shapes - log_target, shapes
