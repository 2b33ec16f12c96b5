"""Poisson subordinator with unit jumps and optional drift."""

import numpy as np
from scipy import stats

from subfield.interfaces.subordinator_interface import Discretization, SubordinatorFamily
from subfield.stochastics.rng import RngStream


class PoissonFamily(SubordinatorFamily):
    """Counting process: Levy measure lambda * delta_1, drift gamma."""

    monotone = True
    finite_activity = True

    def __init__(self, intensity: float, drift: float = 0.0):
        self.intensity = intensity
        self.drift = drift

    def sample_increments(self, rng: RngStream, dt: np.ndarray, size: int) -> np.ndarray:
        dt = np.asarray(dt, dtype=float).reshape(-1)
        counts = rng.generator.poisson(self.intensity * dt, size=(size, dt.shape[0]))
        return counts.astype(float) + self.drift * dt

    def density(self, t: float, z: np.ndarray) -> np.ndarray:
        """Discrete density: the pmf at integer (drift-shifted) points, 0 elsewhere."""
        k = np.asarray(z, dtype=float) - self.drift * t
        rounded = np.round(k)
        on_lattice = np.isclose(k, rounded, rtol=0.0, atol=1e-12) & (rounded >= 0)
        pmf = stats.poisson.pmf(np.where(on_lattice, rounded, 0), self.intensity * t)
        return np.where(on_lattice, pmf, 0.0)

    def laplace_exponent(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.drift * u - self.intensity * np.expm1(-u)

    def levy_density(self, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(y, dtype=float))

    def levy_discretization(self) -> Discretization:
        return np.array([1.0]), np.array([self.intensity])

    def marginal_rule(self, t: float, n_nodes: int, quantile: float) -> Discretization:
        # pmf atoms replace the trapezoid nodes; n_nodes is not used
        if t == 0:
            return np.array([0.0]), np.array([1.0])
        top = int(stats.poisson.ppf(quantile, self.intensity * t))
        atoms = np.arange(top + 1, dtype=float)
        weights = stats.poisson.pmf(atoms, self.intensity * t)
        return atoms + self.drift * t, weights / weights.sum()

    def mean(self, t: float) -> float:
        return (self.intensity + self.drift) * t
