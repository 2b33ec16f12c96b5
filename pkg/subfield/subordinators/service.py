"""Operations on subordinator models: sampling, densities, Laplace exponents, CPA."""

import logging
from typing import Callable, Optional

import numpy as np

from subfield.core.exceptions import UnsupportedOperationError
from subfield.interfaces.subordinator_interface import SubordinatorFamily
from subfield.stochastics.rng import RngStream
from subfield.subordinators.compound_poisson import CompoundPoissonFamily, gamma_levy_density
from subfield.subordinators.gamma import GammaFamily
from subfield.subordinators.models import SubordinatorKind, SubordinatorModel, SubordinatorPath
from subfield.subordinators.poisson import PoissonFamily
from subfield.subordinators.student_t import StudentTFamily

logger = logging.getLogger(__name__)


def build_family(model: SubordinatorModel) -> SubordinatorFamily:
    """Instantiates the family object implementing ``model``."""
    if model.kind == SubordinatorKind.GAMMA:
        return GammaFamily(model.gamma_shape, model.gamma_rate, model.drift)
    if model.kind == SubordinatorKind.POISSON:
        return PoissonFamily(model.poisson_lambda, model.drift)
    if model.kind == SubordinatorKind.STUDENT_T_UNIT_TIME:
        return StudentTFamily(model.t_dof)
    levy = model._levy_density
    if levy is None:
        if model.gamma_shape is None or model.gamma_rate is None:
            raise ValueError("Compound Poisson approximation needs a Levy density or Gamma parameters")
        levy = gamma_levy_density(model.gamma_shape, model.gamma_rate)
    return CompoundPoissonFamily(levy, model.drift, model.cpa_eps)


def marginal_sample(rng: RngStream, model: SubordinatorModel, t: float, size: Optional[int] = None):
    """Draws l(t); t = 0 returns 0.

    Raises:
        ValueError: If t < 0.
        UnsupportedOperationError: For Student-t processes at non-integer t.
    """
    if t < 0:
        raise ValueError(f"Time must be >= 0, got {t}")
    n = 1 if size is None else size
    if t == 0:
        draws = np.zeros(n)
    else:
        draws = model.family.sample_increments(rng, np.array([float(t)]), n)[:, 0]
    return float(draws[0]) if size is None else draws


def path_sample(rng: RngStream, model: SubordinatorModel, grid) -> SubordinatorPath:
    """Samples l jointly on an increasing grid by summing independent increments."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("Grid must be nonempty")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("Grid must be strictly increasing with nonnegative times")
    steps = np.diff(np.concatenate(([0.0], grid)))
    increments = model.family.sample_increments(rng, steps, 1)[0]
    return SubordinatorPath(grid=grid, values=np.cumsum(increments))


def path_sample_batch(rng: RngStream, model: SubordinatorModel, grid, size: int) -> np.ndarray:
    """Samples ``size`` independent paths on ``grid``; shape (size, len(grid))."""
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("Grid must be strictly increasing with nonnegative times")
    steps = np.diff(np.concatenate(([0.0], grid)))
    return np.cumsum(model.family.sample_increments(rng, steps, size), axis=1)


def marginal_density(model: SubordinatorModel, t: float, z):
    """Density of l(t) at z (pmf on the lattice for Poisson).

    Raises:
        ValueError: If t <= 0.
        UnsupportedOperationError: For CPA models and Student-t at t != 1.
    """
    if not t > 0:
        raise ValueError(f"Density requires t > 0, got {t}")
    values = model.family.density(t, z)
    return float(values) if np.ndim(values) == 0 else values


def laplace_exponent(model: SubordinatorModel, u):
    """psi(u) with E exp(-u l(t)) = exp(-t psi(u))."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0):
        raise ValueError("Laplace exponent requires u >= 0")
    values = model.family.laplace_exponent(u_arr)
    return float(values) if np.ndim(values) == 0 else values


def levy_density(model: SubordinatorModel, y):
    """Density of the model's Levy measure on (0, inf)."""
    return model.family.levy_density(y)


def is_finite_activity(model: SubordinatorModel) -> bool:
    return model.family.finite_activity


def cpa_build(base_levy_measure: Callable[[np.ndarray], np.ndarray], gamma: float, eps: float) -> SubordinatorModel:
    """Builds the compound-Poisson approximation of a subordinator.

    Args:
        base_levy_measure: Levy density on (0, inf), vectorized.
        gamma: Drift of the approximated subordinator.
        eps: Jump truncation level.

    Returns:
        A CompoundPoissonApprox model whose drift absorbs the mean of the
        discarded jumps below ``eps``.

    Raises:
        ValueError: If the tail beyond ``eps`` is not integrable.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if gamma < 0:
        raise ValueError(f"Drift must be >= 0, got {gamma}")
    model = SubordinatorModel(kind=SubordinatorKind.COMPOUND_POISSON_APPROX, drift=gamma, cpa_eps=eps)
    model._levy_density = base_levy_measure
    family = CompoundPoissonFamily(base_levy_measure, gamma, eps)
    model._family = family
    return model


def zero_subordinator() -> SubordinatorModel:
    """Degenerate subordinator l = 0: a CPA with zero intensity and zero drift."""
    return cpa_build(lambda y: np.zeros_like(np.asarray(y, dtype=float)), 0.0, 1.0)


def cpa_from_gamma(shape: float, rate: float, eps: float, gamma: float = 0.0) -> SubordinatorModel:
    model = cpa_build(gamma_levy_density(shape, rate), gamma, eps)
    # keep the base parameters so the model round-trips through configuration
    model.gamma_shape = shape
    model.gamma_rate = rate
    return model


def get_family(model: SubordinatorModel) -> SubordinatorFamily:
    family = model.family
    if not isinstance(family, SubordinatorFamily):
        raise UnsupportedOperationError(f"No family implementation for {model.kind}")
    return family
