"""Base samplers on top of :class:`RngStream`.

Each sampler returns a Python float when ``size`` is None and an ndarray
otherwise. Gamma draws use numpy's generator, which implements the
Marsaglia-Tsang squeeze method (with the power boost for shape < 1).
"""

from typing import Optional, Tuple, Union

import numpy as np

from subfield.stochastics.rng import RngStream

Size = Optional[Union[int, Tuple[int, ...]]]


def _scalar_or_array(values: np.ndarray, size: Size):
    if size is None:
        return values.item()
    return values


def sample_normal(rng: RngStream, mean: float, sd: float, size: Size = None):
    """Draws from N(mean, sd**2); sd = 0 returns mean exactly."""
    if sd < 0 or not np.isfinite(sd):
        raise ValueError(f"sd must be a finite value >= 0, got {sd}")
    if sd == 0:
        out = np.full(() if size is None else size, float(mean))
        return _scalar_or_array(out, size)
    return _scalar_or_array(np.asarray(rng.generator.normal(mean, sd, size=size)), size)


def sample_gamma(rng: RngStream, shape: float, rate: float, size: Size = None):
    """Draws from Gamma(shape, rate) with mean shape/rate."""
    if not shape > 0 or not rate > 0:
        raise ValueError(f"Gamma parameters must be positive, got shape={shape}, rate={rate}")
    draws = np.asarray(rng.generator.gamma(shape, 1.0 / rate, size=size))
    return _scalar_or_array(draws, size)


def sample_poisson(rng: RngStream, intensity: float, size: Size = None):
    """Draws from Poisson(intensity); intensity = 0 returns 0."""
    if intensity < 0 or not np.isfinite(intensity):
        raise ValueError(f"Poisson intensity must be finite and >= 0, got {intensity}")
    draws = np.asarray(rng.generator.poisson(intensity, size=size))
    if size is None:
        return int(draws)
    return draws


def sample_student_t(rng: RngStream, dof: float, size: Size = None):
    """Draws from Student's t distribution with ``dof`` degrees of freedom."""
    if not dof > 0:
        raise ValueError(f"dof must be positive, got {dof}")
    return _scalar_or_array(np.asarray(rng.generator.standard_t(dof, size=size)), size)
