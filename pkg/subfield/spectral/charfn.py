"""Characteristic functions of the pointwise law of a subordinated field."""

import logging

import numpy as np
from scipy.integrate import trapezoid

from subfield.core.exceptions import UnsupportedOperationError
from subfield.field.models import FieldModel
from subfield.field.sampling import sample_transformed
from subfield.grf.covariance import variance_fn
from subfield.grf.models import CovarianceKind
from subfield.spectral.models import CharFn, NuSharp, Provenance
from subfield.spectral.nusharp import nu_sharp_density, nu_sharp_support
from subfield.stochastics.rng import RngStream
from subfield.subordinators.service import laplace_exponent

logger = logging.getLogger(__name__)

_XI_CHUNK = 64
_NUSHARP_LOG_STEP = 0.002
_NUSHARP_Z_MIN = 1e-8


def gaussian_charfn(sigma2: float, point=()) -> CharFn:
    """Characteristic function of N(0, sigma2)."""
    return CharFn(
        func=lambda xi: np.exp(-0.5 * sigma2 * xi**2).astype(complex),
        point=tuple(point),
        provenance=Provenance.CLOSED_FORM,
    )


def _require_closed_form(model: FieldModel) -> None:
    if model.cov.kind == CovarianceKind.BROWNIAN_SHEET:
        raise UnsupportedOperationError(
            "Closed-form characteristic function needs a stationary or sqrt-scaled stationary covariance"
        )
    if model.cov.kind == CovarianceKind.SQRT_SCALED_STATIONARY and any(not s.monotone for s in model.subs):
        raise UnsupportedOperationError("Closed-form characteristic function needs subordinators on every axis")


def charfn_levy_khinchin(model: FieldModel, x) -> CharFn:
    """Closed-form characteristic function of L(x).

    For the sqrt-scaled stationary field, phi(xi) = exp(-sum_k x_k psi_k(sigma^2 xi^2 / 2));
    for the stationary Matern field the pointwise law is N(0, sigma^2).

    Raises:
        UnsupportedOperationError: For the Brownian sheet.
    """
    _require_closed_form(model)
    point = model.check_points(x)[0]
    sigma2 = model.cov.matern_sigma2
    if model.cov.kind == CovarianceKind.MATERN_STATIONARY:
        return gaussian_charfn(sigma2, point)

    subs = list(model.subs)

    def func(xi: np.ndarray) -> np.ndarray:
        u = 0.5 * sigma2 * xi**2
        exponent = np.zeros_like(u)
        for sub, t in zip(subs, point):
            if t > 0:
                exponent += t * laplace_exponent(sub, u)
        return np.exp(-exponent).astype(complex)

    return CharFn(func=func, point=tuple(point), provenance=Provenance.CLOSED_FORM)


def charfn_mixture(model: FieldModel, x, n_mc: int, rng: RngStream) -> CharFn:
    """Mixture representation: average of exp(-xi^2 sigma_W^2(transformed point) / 2)."""
    if n_mc < 1:
        raise ValueError(f"n_mc must be >= 1, got {n_mc}")
    point = model.check_points(x)[0]
    variances = np.asarray(variance_fn(model.cov, sample_transformed(rng, model, point, n_mc)), dtype=float)

    def func(xi: np.ndarray) -> np.ndarray:
        out = np.empty(xi.shape, dtype=complex)
        for start in range(0, xi.size, _XI_CHUNK):
            chunk = xi[start:start + _XI_CHUNK]
            out[start:start + _XI_CHUNK] = np.exp(-0.5 * chunk[:, None] ** 2 * variances[None, :]).mean(axis=1)
        return out

    return CharFn(func=func, point=tuple(point), provenance=Provenance.MIXTURE_QUADRATURE, note=f"n_mc={n_mc}")


def charfn_empirical(samples, x=()) -> CharFn:
    """Plain average of exp(i xi X) over samples."""
    data = np.asarray(samples, dtype=float).reshape(-1)
    if data.size == 0:
        raise ValueError("Empirical characteristic function needs samples")

    def func(xi: np.ndarray) -> np.ndarray:
        out = np.empty(xi.shape, dtype=complex)
        for start in range(0, xi.size, _XI_CHUNK):
            arg = xi[start:start + _XI_CHUNK, None] * data[None, :]
            out[start:start + _XI_CHUNK] = np.cos(arg).mean(axis=1) + 1j * np.sin(arg).mean(axis=1)
        return out

    return CharFn(func=func, point=tuple(x), provenance=Provenance.EMPIRICAL, note=f"n={data.size}")


def _jump_integral_factory(ns: NuSharp):
    """Returns xi -> int (1 - cos(xi z)) nu#(dz) over z != 0."""
    z_max = nu_sharp_support(ns)
    if z_max == 0.0:
        return lambda xi: np.zeros_like(xi)
    s = np.arange(np.log(_NUSHARP_Z_MIN), np.log(z_max) + _NUSHARP_LOG_STEP, _NUSHARP_LOG_STEP)
    z = np.exp(s)
    # density in log z, folded onto z > 0
    mass = 2.0 * nu_sharp_density(ns, z) * z

    def integral(xi: np.ndarray) -> np.ndarray:
        out = np.empty(xi.shape)
        for start in range(0, xi.size, _XI_CHUNK):
            chunk = xi[start:start + _XI_CHUNK]
            # 1 - cos(a) = 2 sin^2(a / 2) avoids cancellation for small a
            integrand = 2.0 * np.sin(0.5 * chunk[:, None] * z[None, :]) ** 2 * mass[None, :]
            out[start:start + _XI_CHUNK] = trapezoid(integrand, s, axis=1)
        return out

    return integral


def charfn_from_nusharp(model: FieldModel, x) -> CharFn:
    """Characteristic function from the drift and the nu# jump measures.

    phi(xi) = exp(-sum_k x_k (sigma^2 xi^2 gamma_k / 2 + int (1 - cos(xi z)) nu#_k(dz))).
    The compensator term of the representation vanishes by symmetry of nu#.

    Raises:
        UnsupportedOperationError: As :func:`charfn_levy_khinchin`.
    """
    _require_closed_form(model)
    point = model.check_points(x)[0]
    sigma2 = model.cov.matern_sigma2
    if model.cov.kind == CovarianceKind.MATERN_STATIONARY:
        return gaussian_charfn(sigma2, point)

    terms = []
    for sub, t in zip(model.subs, point):
        if t > 0:
            drift = float(getattr(sub.family, "drift", sub.drift))
            terms.append((t, drift, _jump_integral_factory(NuSharp(source=sub, sigma2=sigma2))))
    logger.debug(f"Built nu# characteristic function at {tuple(point)} with {len(terms)} active axes")

    def func(xi: np.ndarray) -> np.ndarray:
        exponent = np.zeros(xi.shape)
        for t, drift, jump_integral in terms:
            exponent += t * (0.5 * sigma2 * xi**2 * drift + jump_integral(xi))
        return np.exp(-exponent).astype(complex)

    return CharFn(func=func, point=tuple(point), provenance=Provenance.MIXTURE_QUADRATURE, note="nu# quadrature")
