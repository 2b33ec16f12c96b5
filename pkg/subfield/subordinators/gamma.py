"""Gamma subordinator: l(t) ~ drift * t + Gamma(a * t, b)."""

import logging

import numpy as np
from scipy import stats
from scipy.special import exp1

from subfield.interfaces.subordinator_interface import Discretization, SubordinatorFamily
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

# Levy-measure discretization in log(t)
LOG_STEP = 0.02
T_MIN = 1e-20
TAIL_MASS = 1e-12


class GammaFamily(SubordinatorFamily):
    """Gamma process with Levy density a y^-1 exp(-b y) and optional drift."""

    monotone = True
    finite_activity = False

    def __init__(self, shape: float, rate: float, drift: float = 0.0):
        self.shape = shape
        self.rate = rate
        self.drift = drift

    def sample_increments(self, rng: RngStream, dt: np.ndarray, size: int) -> np.ndarray:
        dt = np.asarray(dt, dtype=float).reshape(-1)
        shapes = np.broadcast_to(self.shape * dt, (size, dt.shape[0]))
        jumps = np.zeros((size, dt.shape[0]))
        active = shapes > 0
        if np.any(active):
            jumps[active] = rng.generator.gamma(shapes[active], 1.0 / self.rate)
        return jumps + self.drift * dt

    def density(self, t: float, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float) - self.drift * t
        return stats.gamma.pdf(z, self.shape * t, scale=1.0 / self.rate)

    def cdf(self, t: float, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float) - self.drift * t
        return stats.gamma.cdf(z, self.shape * t, scale=1.0 / self.rate)

    def quantile(self, t: float, q: float) -> float:
        return float(stats.gamma.ppf(q, self.shape * t, scale=1.0 / self.rate)) + self.drift * t

    def laplace_exponent(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.drift * u + self.shape * np.log1p(u / self.rate)

    def levy_density(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(y > 0, self.shape * np.exp(-self.rate * y) / np.where(y > 0, y, 1.0), 0.0)

    def levy_discretization(self) -> Discretization:
        # t_max: a * E1(b t_max) < TAIL_MASS
        x = 1.0
        while self.shape * exp1(x) >= TAIL_MASS:
            x *= 1.25
        t_max = x / self.rate
        s = np.arange(np.log(T_MIN), np.log(t_max) + LOG_STEP, LOG_STEP)
        nodes = np.exp(s)
        # nu(dt) = a exp(-b t) d(log t)
        weights = self.shape * np.exp(-self.rate * nodes) * LOG_STEP
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return nodes, weights

    def marginal_rule(self, t: float, n_nodes: int, quantile: float) -> Discretization:
        if t == 0:
            return np.array([0.0]), np.array([1.0])
        shape = self.shape * t
        upper = float(stats.gamma.ppf(quantile, shape, scale=1.0 / self.rate))
        if shape >= 1.0:
            nodes = np.linspace(0.0, upper, n_nodes)
            weights = stats.gamma.pdf(nodes, shape, scale=1.0 / self.rate)
            weights[0] *= 0.5
            weights[-1] *= 0.5
        else:
            # Exact cell masses with conditional-mean nodes; the density is
            # unbounded at 0 and a pointwise rule would miss that mass.
            edges = np.linspace(0.0, upper, n_nodes + 1)
            mass = np.diff(stats.gamma.cdf(edges, shape, scale=1.0 / self.rate))
            first_moment = np.diff(stats.gamma.cdf(edges, shape + 1.0, scale=1.0 / self.rate)) * shape / self.rate
            keep = mass > 0
            nodes = first_moment[keep] / mass[keep]
            weights = mass[keep]
        weights = weights / weights.sum()
        return nodes + self.drift * t, weights

    def mean(self, t: float) -> float:
        return (self.shape / self.rate + self.drift) * t
