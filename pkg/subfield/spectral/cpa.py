"""Compound-Poisson rendition of the transformed processes behind the sum representation.

The pointwise law of a sqrt-scaled field is that of l~_1(x_1) + ... + l~_d(x_d),
where l~_k has Gaussian part sigma^2 gamma_k and jump measure nu#_k. Simulating
l~_k by compensated Poisson sums of jumps above ``eps`` (the CPA route) folds
the symmetric jump measure onto positive jump sizes; the result keeps mean and
variance but is skewed, unlike L(x) itself.
"""

import logging

import numpy as np
from scipy import stats

from subfield.core.exceptions import UnsupportedOperationError
from subfield.field.models import FieldModel
from subfield.grf.models import CovarianceKind
from subfield.spectral.models import NuSharp
from subfield.spectral.nusharp import nu_sharp_mass, nu_sharp_support
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

DEFAULT_BINS = 256


def folded_jump_bins(ns: NuSharp, eps: float, n_bins: int = DEFAULT_BINS):
    """Jump sizes (geometric bin centres) and masses of 2 nu# on [eps, z_max]."""
    z_max = nu_sharp_support(ns)
    if z_max <= eps:
        return np.zeros(0), np.zeros(0)
    edges = np.geomspace(eps, z_max, n_bins + 1)
    masses = np.array([2.0 * nu_sharp_mass(ns, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])
    return np.sqrt(edges[:-1] * edges[1:]), masses


def cpa_transformed_sample(rng: RngStream, model: FieldModel, x, n: int, eps: float = 1e-3) -> np.ndarray:
    """Draws n copies of the CPA-composed sum l~_1(x_1) + ... + l~_d(x_d).

    Raises:
        UnsupportedOperationError: Unless the covariance is sqrt-scaled stationary.
    """
    if model.cov.kind != CovarianceKind.SQRT_SCALED_STATIONARY:
        raise UnsupportedOperationError("CPA sum representation needs a sqrt-scaled stationary covariance")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    point = model.check_points(x)[0]
    sigma2 = model.cov.matern_sigma2
    total = np.zeros(n)
    for sub, t in zip(model.subs, point):
        if t == 0:
            continue
        ns = NuSharp(source=sub, sigma2=sigma2)
        sizes, masses = folded_jump_bins(ns, eps)
        if sizes.size:
            rates = t * masses
            counts = rng.generator.poisson(rates, size=(n, sizes.size))
            total += (counts - rates) @ sizes
        drift = float(getattr(sub.family, "drift", sub.drift))
        if drift > 0:
            total += np.sqrt(sigma2 * drift * t) * rng.generator.standard_normal(n)
    logger.debug(f"Drew {n} CPA-composed sums at {tuple(point)} with eps={eps}")
    return total


def skewness(samples) -> float:
    """Sample skewness (biased moment estimator)."""
    return float(stats.skew(np.asarray(samples, dtype=float).reshape(-1)))
