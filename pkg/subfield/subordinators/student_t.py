"""Student-t Levy process observed at integer times.

The unit-time marginal is t(dof); l(k) for integer k is a sum of k
independent unit increments. It is not a subordinator: fields use it only
through absolute values.
"""

import numpy as np
from scipy import stats

from subfield.core.exceptions import UnsupportedOperationError
from subfield.interfaces.subordinator_interface import Discretization, SubordinatorFamily
from subfield.stochastics.rng import RngStream


def _integer_steps(dt: np.ndarray) -> np.ndarray:
    steps = np.round(dt)
    if np.any(np.abs(dt - steps) > 1e-12) or np.any(steps < 0):
        raise UnsupportedOperationError(
            f"Student-t process is only available at integer times, got steps {dt.tolist()}"
        )
    return steps.astype(int)


class StudentTFamily(SubordinatorFamily):
    monotone = False
    finite_activity = False

    def __init__(self, dof: float):
        self.dof = dof

    def sample_increments(self, rng: RngStream, dt: np.ndarray, size: int) -> np.ndarray:
        steps = _integer_steps(np.asarray(dt, dtype=float).reshape(-1))
        out = np.zeros((size, steps.shape[0]))
        for j, k in enumerate(steps):
            if k > 0:
                out[:, j] = rng.generator.standard_t(self.dof, size=(size, k)).sum(axis=1)
        return out

    def density(self, t: float, z: np.ndarray) -> np.ndarray:
        if t != 1:
            raise UnsupportedOperationError(f"Student-t density is only available at t = 1, got t = {t}")
        return stats.t.pdf(np.asarray(z, dtype=float), self.dof)

    def laplace_exponent(self, u: np.ndarray) -> np.ndarray:
        raise UnsupportedOperationError("Student-t process is not a subordinator: no Laplace exponent")

    def levy_density(self, y: np.ndarray) -> np.ndarray:
        raise UnsupportedOperationError("Student-t Levy measure is not available in closed form")

    def levy_discretization(self) -> Discretization:
        raise UnsupportedOperationError("Student-t Levy measure is not available in closed form")

    def marginal_rule(self, t: float, n_nodes: int, quantile: float) -> Discretization:
        if t == 0:
            return np.array([0.0]), np.array([1.0])
        if t != 1:
            raise UnsupportedOperationError(f"Student-t marginal rule is only available at t = 1, got t = {t}")
        bound = float(stats.t.ppf(quantile, self.dof))
        nodes = np.linspace(-bound, bound, n_nodes)
        weights = stats.t.pdf(nodes, self.dof)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return nodes, weights / weights.sum()

    def mean(self, t: float) -> float:
        _integer_steps(np.array([t]))
        return 0.0
