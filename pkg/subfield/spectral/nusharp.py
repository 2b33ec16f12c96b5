"""The transformed Levy measure nu# of a subordinated axis.

nu#([a, b]) = int_0^inf P(N(0, sigma2 * t) in [a, b]) nu(dt),
evaluated over the source family's Levy-measure discretization with the
inner Gaussian probability in closed form.
"""

import math

import numpy as np
from scipy.special import ndtr

from subfield.spectral.models import NuSharp

_CHUNK = 512


def nu_sharp_mass(ns: NuSharp, a: float, b: float) -> float:
    """Mass nu#([a, b]).

    Intervals on the negative half-line are mirrored, so the result is exactly
    symmetric. Intervals touching 0 have infinite mass under an
    infinite-activity source.

    Raises:
        ValueError: If a > b.
    """
    if a > b:
        raise ValueError(f"Interval bounds must satisfy a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    if b <= 0:
        a, b = -b, -a
    family = ns.source.family
    if a <= 0 <= b and not family.finite_activity:
        return math.inf
    nodes, weights = family.levy_discretization()
    if nodes.size == 0:
        return 0.0
    sd = np.sqrt(ns.sigma2 * nodes)
    # upper-tail differences keep precision for intervals far in the tail
    probs = ndtr(-a / sd) - ndtr(-b / sd)
    return math.fsum(weights * probs)


def nu_sharp_density(ns: NuSharp, z) -> np.ndarray:
    """Lebesgue density of nu# at z != 0."""
    z = np.asarray(z, dtype=float).reshape(-1)
    nodes, weights = ns.source.family.levy_discretization()
    out = np.zeros(z.shape)
    if nodes.size == 0:
        return out
    var = ns.sigma2 * nodes
    coef = weights / np.sqrt(2.0 * np.pi * var)
    for start in range(0, z.size, _CHUNK):
        zc = z[start:start + _CHUNK]
        with np.errstate(under="ignore"):
            kernel = np.exp(-0.5 * zc[:, None] ** 2 / var[None, :])
        out[start:start + _CHUNK] = kernel @ coef
    return out


def nu_sharp_support(ns: NuSharp) -> float:
    """A radius beyond which nu# carries negligible mass (10 sd at the largest jump node)."""
    nodes, _ = ns.source.family.levy_discretization()
    if nodes.size == 0:
        return 0.0
    return 10.0 * math.sqrt(ns.sigma2 * float(nodes.max()))
