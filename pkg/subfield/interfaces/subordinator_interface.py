"""Interface definition for subordinator (and unit-time Student-t) families.
"""

from typing import Protocol, Tuple, runtime_checkable

import numpy as np

from subfield.stochastics.rng import RngStream

# (nodes, weights) pair of a discrete rule or measure
Discretization = Tuple[np.ndarray, np.ndarray]


@runtime_checkable
class SubordinatorFamily(Protocol):
    """A protocol for the Levy-process families that time-change a field axis.

    This ensures the field, spectral and covariance modules can treat Gamma,
    Poisson, compound-Poisson and Student-t processes interchangeably.
    """

    monotone: bool
    finite_activity: bool

    def sample_increments(self, rng: RngStream, dt: np.ndarray, size: int) -> np.ndarray:
        """Draws independent increments.

        Args:
            rng: Random stream.
            dt: Nonnegative time steps, shape (k,).
            size: Number of independent rows.

        Returns:
            Array of shape (size, k); column j is distributed as l(dt[j]).

        Raises:
            UnsupportedOperationError: If a step is outside the family's support.
        """
        ...

    def density(self, t: float, z: np.ndarray) -> np.ndarray:
        """Marginal density (or pmf) of l(t) at ``z``."""
        ...

    def laplace_exponent(self, u: np.ndarray) -> np.ndarray:
        """psi(u) with E exp(-u l(t)) = exp(-t psi(u))."""
        ...

    def levy_density(self, y: np.ndarray) -> np.ndarray:
        """Density of the Levy measure on (0, inf) (zero for atomic measures)."""
        ...

    def levy_discretization(self) -> Discretization:
        """Nodes and weights representing the Levy measure for quadrature."""
        ...

    def marginal_rule(self, t: float, n_nodes: int, quantile: float) -> Discretization:
        """Quadrature rule (nodes, weights summing to 1) for expectations over l(t)."""
        ...

    def mean(self, t: float) -> float:
        """E l(t)."""
        ...
