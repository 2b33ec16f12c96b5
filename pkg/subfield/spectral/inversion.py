"""Gil-Pelaez inversion of characteristic functions.

pdf(z) = (1/pi) int_0^inf Re(exp(-i xi z) phi(xi)) dxi
cdf(z) = 1/2 - (1/pi) int_0^inf Im(exp(-i xi z) phi(xi)) / xi dxi

Both integrals are truncated at xi_max (the first frequency with
|phi| < cf_tail_tolerance, capped) and evaluated with the midpoint rule on
the first cell and the trapezoid rule on the rest.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from subfield.core.config import get_settings
from subfield.field.models import FieldModel
from subfield.spectral.charfn import charfn_levy_khinchin
from subfield.spectral.models import CdfTable, CharFn

logger = logging.getLogger(__name__)

_Z_CHUNK = 64
_BISECTION_STEPS = 60
_MAX_DOUBLINGS = 80


@dataclass
class InversionGrid:
    """Frequency nodes, quadrature weights and cached cf values."""

    xi: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    xi_max: float


def find_xi_max(cf: CharFn, tolerance: float, cap: float) -> float:
    """Smallest xi (up to bisection accuracy) with |cf(xi)| < tolerance, at most ``cap``."""
    hi = 1.0
    while abs(cf.eval(hi)) >= tolerance:
        hi *= 2.0
        if hi >= cap:
            return cap
    lo = 0.0
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if abs(cf.eval(mid)) >= tolerance:
            lo = mid
        else:
            hi = mid
    return min(hi, cap)


def inversion_grid(cf: CharFn, xi_max: Optional[float] = None, n_nodes: Optional[int] = None) -> InversionGrid:
    """Builds the quadrature grid for ``cf``.

    Args:
        cf: Characteristic function to invert.
        xi_max: Fixed truncation frequency; searched when None.
        n_nodes: Trapezoid nodes on (0, xi_max]; defaults to ``Settings.gil_pelaez_nodes``.
    """
    settings = get_settings()
    n = n_nodes or settings.gil_pelaez_nodes
    if xi_max is None:
        xi_max = find_xi_max(cf, settings.cf_tail_tolerance, settings.gil_pelaez_xi_cap)
    h = xi_max / n
    nodes = h * np.arange(1, n + 1)
    trap = np.full(n, h)
    trap[0] *= 0.5
    trap[-1] *= 0.5
    xi = np.concatenate(([0.5 * h], nodes))
    weights = np.concatenate(([h], trap))
    values = cf.eval(xi)
    tail = abs(values[-1])
    if tail > settings.heavy_tail_warning:
        logger.warning(
            f"Characteristic function still at {tail:.2e} at xi_max={xi_max:.3g}; "
            "inversion is truncated (heavy tail or point mass)"
        )
    return InversionGrid(xi=xi, weights=weights, values=values, xi_max=xi_max)


def _integrate(grid: InversionGrid, z: np.ndarray, kind: str) -> np.ndarray:
    out = np.empty(z.shape)
    re = grid.values.real
    im = grid.values.imag
    for start in range(0, z.size, _Z_CHUNK):
        arg = z[start:start + _Z_CHUNK, None] * grid.xi[None, :]
        cos, sin = np.cos(arg), np.sin(arg)
        if kind == "pdf":
            integrand = cos * re + sin * im
        else:
            integrand = (cos * im - sin * re) / grid.xi
        out[start:start + _Z_CHUNK] = integrand @ grid.weights
    return out


def _shape_like(values: np.ndarray, z):
    if np.ndim(z) == 0:
        return float(values[0])
    return values.reshape(np.shape(z))


def gil_pelaez_pdf(cf: CharFn, z, grid: Optional[InversionGrid] = None):
    """Density of the law with characteristic function ``cf``, clipped at 0."""
    grid = grid or inversion_grid(cf)
    zz = np.asarray(z, dtype=float).reshape(-1)
    pdf = np.clip(_integrate(grid, zz, "pdf") / np.pi, 0.0, None)
    return _shape_like(pdf, z)


def gil_pelaez_cdf(cf: CharFn, z, grid: Optional[InversionGrid] = None):
    """CDF of the law with characteristic function ``cf``, clamped to [0, 1]."""
    grid = grid or inversion_grid(cf)
    zz = np.asarray(z, dtype=float).reshape(-1)
    cdf = np.clip(0.5 - _integrate(grid, zz, "cdf") / np.pi, 0.0, 1.0)
    return _shape_like(cdf, z)


def support_bound(cf: CharFn, tail: float, grid: Optional[InversionGrid] = None) -> float:
    """Half-width b with cdf(-b) < tail and cdf(b) > 1 - tail."""
    grid = grid or inversion_grid(cf)
    # initial scale from the frequency where |cf| halves
    lo, hi = 0.0, grid.xi_max
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if abs(cf.eval(mid)) > 0.5:
            lo = mid
        else:
            hi = mid
    bound = 2.0 / max(hi, 1e-12)
    for _ in range(_MAX_DOUBLINGS):
        ends = gil_pelaez_cdf(cf, np.array([-bound, bound]), grid)
        if ends[0] < tail and ends[1] > 1.0 - tail:
            return bound
        bound *= 2.0
    raise ValueError("Could not bracket the distribution's support")


def tabulate_cdf(
    cf: CharFn,
    n_nodes: Optional[int] = None,
    tail: Optional[float] = None,
    grid: Optional[InversionGrid] = None,
) -> CdfTable:
    """Tabulates cdf and pdf on an even grid covering all but ``tail`` mass per side.

    The tabulated CDF is made nondecreasing before it is returned.
    """
    settings = get_settings()
    n = n_nodes or settings.cdf_table_nodes
    tail = settings.cdf_table_quantile if tail is None else tail
    grid = grid or inversion_grid(cf)
    bound = support_bound(cf, tail, grid)
    z = np.linspace(-bound, bound, n)
    cdf = np.maximum.accumulate(gil_pelaez_cdf(cf, z, grid))
    pdf = gil_pelaez_pdf(cf, z, grid)
    return CdfTable(z=z, cdf=cdf, pdf=pdf)


def sum_representation_density(model: FieldModel, x, grid) -> np.ndarray:
    """Density of L(x) on ``grid`` by inverting the closed-form characteristic function.

    Raises:
        UnsupportedOperationError: If no closed-form characteristic function exists.
    """
    cf = charfn_levy_khinchin(model, x)
    return np.asarray(gil_pelaez_pdf(cf, np.asarray(grid, dtype=float)))
