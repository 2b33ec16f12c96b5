"""Covariance, variance and radial Matern profile of the supported GRF models.

All functions broadcast over leading axes: a point array has shape ``(..., d)``.
"""

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import kv

from subfield.grf.models import CovarianceKind, CovarianceModel

# Below this Bessel argument rho is replaced by its s -> 0 limit sigma^2.
_SMALL_ARGUMENT = 1e-14


def matern_rho(s, nu: float, r: float, sigma2: float) -> np.ndarray:
    """Matern radial profile with Bessel argument ``2 s sqrt(nu) / r``.

    rho(s) = sigma2 * 2^(1-nu) / Gamma(nu) * u^nu * K_nu(u),  u = 2 s sqrt(nu) / r.
    """
    s = np.asarray(s, dtype=float)
    u = 2.0 * s * np.sqrt(nu) / r
    out = np.full(u.shape, float(sigma2))
    mask = u > _SMALL_ARGUMENT
    if np.any(mask):
        um = u[mask]
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            values = sigma2 * 2.0 ** (1.0 - nu) / gamma_fn(nu) * um**nu * kv(nu, um)
        # kv underflows to 0 far out; the product is then 0 as well
        out[mask] = np.where(np.isfinite(values), values, 0.0)
    return out


def _as_points(x, dim: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dim:
        raise ValueError(f"Expected points with last dimension {dim}, got shape {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("Point coordinates must be finite and >= 0")
    return arr


def cov_eval(model: CovarianceModel, x, y) -> np.ndarray:
    """Evaluates q_W(x, y), broadcasting over leading axes.

    Returns a float for single points and an array otherwise.

    Raises:
        ValueError: On negative or non-finite coordinates or a dimension mismatch.
    """
    xa = _as_points(x, model.dim)
    ya = _as_points(y, model.dim)
    if model.kind == CovarianceKind.BROWNIAN_SHEET:
        value = np.prod(np.minimum(xa, ya), axis=-1)
    else:
        dist = np.sqrt(np.sum((xa - ya) ** 2, axis=-1))
        value = matern_rho(dist, model.matern_nu, model.matern_r, model.matern_sigma2)
        if model.kind == CovarianceKind.SQRT_SCALED_STATIONARY:
            value = np.sqrt(np.sum(xa, axis=-1)) * np.sqrt(np.sum(ya, axis=-1)) * value
    if np.ndim(value) == 0:
        return float(value)
    return value


def variance_fn(model: CovarianceModel, x) -> np.ndarray:
    """Pointwise variance sigma_W^2(x) = q_W(x, x)."""
    xa = _as_points(x, model.dim)
    if model.kind == CovarianceKind.BROWNIAN_SHEET:
        value = np.prod(xa, axis=-1)
    elif model.kind == CovarianceKind.SQRT_SCALED_STATIONARY:
        value = model.matern_sigma2 * np.sum(xa, axis=-1)
    else:
        value = np.full(xa.shape[:-1], model.matern_sigma2)
    if np.ndim(value) == 0:
        return float(value)
    return value


def cov_matrix(model: CovarianceModel, points_a, points_b=None) -> np.ndarray:
    """Assembles ``[q_W(a_i, b_j)]`` for two point lists (``b`` defaults to ``a``)."""
    a = _as_points(np.atleast_2d(points_a), model.dim)
    b = a if points_b is None else _as_points(np.atleast_2d(points_b), model.dim)
    matrix = np.asarray(cov_eval(model, a[:, None, :], b[None, :, :]), dtype=float)
    if points_b is None:
        # exact symmetry regardless of rounding in the distance computation
        matrix = 0.5 * (matrix + matrix.T)
    return matrix
