"""Levenberg-Marquardt least squares on squared parameters.

Parameters are written as theta = u * u elementwise, which keeps them
nonnegative and lets a fit start from exact zeros.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from subfield.core.exceptions import NumericalError
from subfield.fit.models import FitResult

logger = logging.getLogger(__name__)

ResidualFn = Callable[[np.ndarray], np.ndarray]

LAMBDA_INIT = 1e-3
LAMBDA_FACTOR = 10.0
LAMBDA_MAX = 1e16
RELATIVE_DECREASE_TOL = 1e-10
STEP_TOL = 1e-12
FD_STEP = 1e-6
# |delta u_i| <= STEP_BOUND * (|u_i| + 1) for every accepted trial step
STEP_BOUND = 0.5


def _step_sizes(u: np.ndarray) -> np.ndarray:
    # steps point away from zero so that u and -u give mirrored Jacobians
    return FD_STEP * (1.0 + np.abs(u)) * np.where(u < 0, -1.0, 1.0)


def forward_difference_jacobian(fn: Callable[[np.ndarray], np.ndarray], u: np.ndarray, f0: Optional[np.ndarray] = None):
    """J[:, i] = (fn(u + h_i e_i) - fn(u)) / h_i with h_i = 1e-6 (1 + |u_i|)."""
    u = np.asarray(u, dtype=float)
    f0 = fn(u) if f0 is None else f0
    h = _step_sizes(u)
    jac = np.empty((f0.size, u.size))
    for i in range(u.size):
        shifted = u.copy()
        shifted[i] += h[i]
        jac[:, i] = (fn(shifted) - f0) / h[i]
    return jac


def central_difference_jacobian(fn: Callable[[np.ndarray], np.ndarray], u: np.ndarray, step: float = 1e-5):
    """Second-order central differences, used to validate the forward Jacobian."""
    u = np.asarray(u, dtype=float)
    columns = []
    for i in range(u.size):
        h = step * (1.0 + abs(u[i]))
        up, down = u.copy(), u.copy()
        up[i] += h
        down[i] -= h
        columns.append((fn(up) - fn(down)) / (2.0 * h))
    return np.stack(columns, axis=1)


def _squared_norm(r: np.ndarray) -> float:
    return math.fsum(float(v) * float(v) for v in r)


def lm_minimize(residual_fn: ResidualFn, theta0, max_iter: int) -> FitResult:
    """Minimizes ||residual_fn(theta)||^2 over theta >= 0, starting at ``theta0``."""
    theta0 = np.asarray(theta0, dtype=float)
    if not np.all(np.isfinite(theta0)) or np.any(theta0 < 0):
        raise ValueError("theta0 must be finite and nonnegative")
    return lm_minimize_u(residual_fn, np.sqrt(theta0), max_iter)


def lm_minimize_u(residual_fn: ResidualFn, u0, max_iter: int) -> FitResult:
    """LM iteration in u-space, theta = u^2.

    Damping is scaled by diag(J^T J) and the damped system is solved as the
    augmented least-squares problem [J; sqrt(lambda D)] delta = [-r; 0].
    Trial steps that move any coordinate by more than STEP_BOUND * (|u_i| + 1)
    are treated like rejected steps, so lambda grows until the step fits.

    Raises:
        NumericalError: If the residual at the start point is not finite.
    """

    def fn(u: np.ndarray) -> np.ndarray:
        return np.asarray(residual_fn(u * u), dtype=float)

    u = np.asarray(u0, dtype=float).copy()
    r = fn(u)
    if not np.all(np.isfinite(r)):
        raise NumericalError(f"Residual is not finite at theta0={np.round(u * u, 6).tolist()}")
    cost = _squared_norm(r)
    trajectory = [math.sqrt(cost)]
    lam = LAMBDA_INIT
    accepted = 0
    converged = cost == 0.0

    while not converged and accepted < max_iter:
        jac = forward_difference_jacobian(fn, u, r)
        scale = np.sum(jac * jac, axis=0)
        floor = 1e-12 * scale.max() if scale.max() > 0 else 1.0
        scale = np.maximum(scale, floor)

        step = None
        while lam <= LAMBDA_MAX:
            system = np.vstack((jac, np.diag(np.sqrt(lam * scale))))
            rhs = np.concatenate((-r, np.zeros(u.size)))
            delta = np.linalg.lstsq(system, rhs, rcond=None)[0]
            if np.any(np.abs(delta) > STEP_BOUND * (np.abs(u) + 1.0)):
                lam *= LAMBDA_FACTOR
                continue
            r_new = fn(u + delta)
            if np.all(np.isfinite(r_new)):
                new_cost = _squared_norm(r_new)
                if new_cost < cost:
                    step = (delta, r_new, new_cost)
                    lam = max(lam / LAMBDA_FACTOR, 1e-12)
                    break
            lam *= LAMBDA_FACTOR
        if step is None:
            logger.warning(f"LM stalled after {accepted} accepted steps: no damping level reduces the residual")
            break

        delta, r, new_cost = step
        u = u + delta
        accepted += 1
        decrease = (cost - new_cost) / cost
        cost = new_cost
        trajectory.append(math.sqrt(cost))
        logger.debug(f"LM step {accepted}: ||r||={trajectory[-1]:.6e}, lambda={lam:.1e}")
        if cost == 0.0 or decrease < RELATIVE_DECREASE_TOL or np.linalg.norm(delta) < STEP_TOL:
            converged = True

    if not converged:
        logger.warning(f"LM did not converge within {max_iter} iterations: ||r||={trajectory[-1]:.4e}")
    theta_hat = u * u
    return FitResult(
        theta_hat=theta_hat.tolist(),
        residual_norm=math.sqrt(_squared_norm(fn(u))),
        n_iterations=accepted,
        converged=converged,
        trajectory=trajectory,
    )
