"""Compound-Poisson approximation (CPA) of a subordinator.

Jumps below ``eps`` are discarded and their mean is moved into the drift;
jumps above ``eps`` arrive at rate nu([eps, inf)) and are drawn from the
normalized restricted Levy measure by inverse-CDF on a log-spaced table.
"""

import logging
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from subfield.core.config import get_settings
from subfield.core.exceptions import UnsupportedOperationError
from subfield.interfaces.subordinator_interface import Discretization, SubordinatorFamily
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

LevyDensity = Callable[[np.ndarray], np.ndarray]

_SEARCH_NODES = 4097
_SMALL_JUMP_DECADES = 60.0
_MAX_DOUBLINGS = 200


def _log_integral(levy_density: LevyDensity, lo: float, hi: float, power: int) -> float:
    """int_lo^hi y^power nu(y) dy on a log grid."""
    s = np.linspace(np.log(lo), np.log(hi), _SEARCH_NODES)
    y = np.exp(s)
    return float(trapezoid(levy_density(y) * y ** (power + 1), s))


def _support_end(levy_density: LevyDensity, eps: float, tolerance: float) -> float:
    """Smallest doubling y_max with nu([y_max, inf)) < tolerance * nu([eps, y_max))."""
    y_max = max(2.0 * eps, 1.0)
    for _ in range(_MAX_DOUBLINGS):
        body = _log_integral(levy_density, eps, y_max, 0)
        tail = _log_integral(levy_density, y_max, 1e3 * y_max, 0)
        if not np.isfinite(body) or not np.isfinite(tail):
            raise ValueError("Levy density is not integrable away from 0")
        if tail <= tolerance * body or (body == 0.0 and tail == 0.0):
            return y_max
        y_max *= 2.0
    raise ValueError(f"Levy measure tail is not integrable beyond eps={eps}")


class CompoundPoissonFamily(SubordinatorFamily):
    """Finite-activity approximation: drift * t + sum of N(t) table-drawn jumps."""

    monotone = True
    finite_activity = True

    def __init__(self, levy_density: LevyDensity, drift: float, eps: float):
        settings = get_settings()
        self.eps = eps
        self._levy_density = levy_density
        y_max = _support_end(levy_density, eps, settings.cpa_tail_tolerance)
        s = np.linspace(np.log(eps), np.log(y_max), settings.cpa_table_nodes)
        self.table_nodes = np.exp(s)
        mass_density = levy_density(self.table_nodes) * self.table_nodes
        cumulative = cumulative_trapezoid(mass_density, s, initial=0.0)
        self.intensity = float(cumulative[-1])
        self.table_cdf = cumulative / self.intensity if self.intensity > 0 else cumulative
        self._table_weights = np.diff(cumulative)
        small = _log_integral(levy_density, eps * np.exp(-_SMALL_JUMP_DECADES), eps, 1)
        self.drift = drift + small
        logger.debug(
            f"CPA built: eps={eps:.3e}, intensity={self.intensity:.6g}, "
            f"compensated drift={self.drift:.6g}, y_max={y_max:.3e}"
        )

    @property
    def deterministic(self) -> bool:
        return self.intensity == 0.0

    def sample_jumps(self, rng: RngStream, n: int) -> np.ndarray:
        u = rng.generator.random(n)
        return np.interp(u, self.table_cdf, self.table_nodes)

    def sample_increments(self, rng: RngStream, dt: np.ndarray, size: int) -> np.ndarray:
        dt = np.asarray(dt, dtype=float).reshape(-1)
        out = np.broadcast_to(self.drift * dt, (size, dt.shape[0])).copy()
        if self.deterministic:
            return out
        counts = rng.generator.poisson(self.intensity * dt, size=(size, dt.shape[0]))
        total = int(counts.sum())
        if total:
            jumps = self.sample_jumps(rng, total)
            cell = np.repeat(np.arange(counts.size), counts.reshape(-1))
            out += np.bincount(cell, weights=jumps, minlength=counts.size).reshape(counts.shape)
        return out

    def density(self, t: float, z: np.ndarray) -> np.ndarray:
        raise UnsupportedOperationError("Compound Poisson approximation has no closed-form density")

    def laplace_exponent(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.deterministic:
            return self.drift * u
        nodes, weights = self.levy_discretization()
        jump_part = (-np.expm1(-np.multiply.outer(u, nodes))) @ weights
        return self.drift * u + jump_part

    def levy_density(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.where(y >= self.eps, self._levy_density(np.maximum(y, self.eps)), 0.0)

    def levy_discretization(self) -> Discretization:
        """Cell-midpoint (geometric) nodes carrying each table cell's mass."""
        if self.deterministic:
            return np.zeros(0), np.zeros(0)
        nodes = np.sqrt(self.table_nodes[:-1] * self.table_nodes[1:])
        return nodes, self._table_weights.copy()

    def marginal_rule(self, t: float, n_nodes: int, quantile: float) -> Discretization:
        if t == 0 or self.deterministic:
            return np.array([self.drift * t]), np.array([1.0])
        raise UnsupportedOperationError(
            "Compound Poisson approximation with jumps has no marginal density for quadrature"
        )

    def mean(self, t: float) -> float:
        nodes, weights = self.levy_discretization()
        return (self.drift + float(nodes @ weights)) * t


def gamma_levy_density(shape: float, rate: float) -> LevyDensity:
    """Returns y -> a y^-1 exp(-b y), the Gamma process Levy density."""

    def density(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return shape * np.exp(-rate * y) / y

    return density
