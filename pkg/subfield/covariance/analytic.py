"""Analytic covariance of two-dimensional subordinated fields by tensor quadrature.

For each axis k the pair (l_k(min), l_k(max)) is written as (s, s + u) with
s ~ l_k(min) and u ~ l_k(|x - x'|) independent, so every integration
variable carries its own one-dimensional marginal rule. Axes whose two
coordinates coincide contribute a single variable.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from subfield.core.exceptions import UnsupportedOperationError
from subfield.covariance.models import QuadratureSpec
from subfield.field.models import FieldModel
from subfield.grf.covariance import cov_eval, matern_rho
from subfield.grf.models import CovarianceKind
from subfield.subordinators.models import SubordinatorModel

logger = logging.getLogger(__name__)

_ROW_CHUNK = 64


def _check_planar(model: FieldModel, p, q) -> Tuple[np.ndarray, np.ndarray]:
    if model.dim != 2:
        raise UnsupportedOperationError(f"Analytic covariance is implemented for d = 2, got d = {model.dim}")
    return model.check_points(p)[0], model.check_points(q)[0]


def _rule(sub: SubordinatorModel, t: float, n_nodes: int, spec: QuadratureSpec):
    return sub.family.marginal_rule(t, n_nodes, spec.truncation_quantile)


def cov_stationary_analytic(model: FieldModel, p, q, spec: Optional[QuadratureSpec] = None) -> float:
    """q_L(p, q) for a stationary Matern field: E rho(|(u_1, u_2)|), u_k ~ l_k(|p_k - q_k|).

    Raises:
        UnsupportedOperationError: For non-stationary covariances, d != 2, or
            non-monotone processes in abs_mode.
    """
    if model.cov.kind != CovarianceKind.MATERN_STATIONARY:
        raise UnsupportedOperationError("Stationary covariance formula needs a Matern stationary field")
    if any(not sub.monotone for sub in model.subs):
        raise UnsupportedOperationError("Stationary covariance formula needs stationary monotone increments")
    spec = spec or QuadratureSpec()
    pa, qa = _check_planar(model, p, q)
    nu, r, sigma2 = model.cov.matern_nu, model.cov.matern_r, model.cov.matern_sigma2
    gaps = np.abs(pa - qa)
    if np.all(gaps == 0):
        return float(sigma2)

    rules = [_rule(sub, float(g), spec.nodes_per_axis, spec) for sub, g in zip(model.subs, gaps)]
    (u1, w1), (u2, w2) = rules
    dist = np.sqrt(u1[:, None] ** 2 + u2[None, :] ** 2)
    weights = w1[:, None] * w2[None, :]
    return math.fsum((matern_rho(dist, nu, r, sigma2) * weights).ravel())


def joint_increment_density(model: SubordinatorModel, x: float, xp: float, s, t):
    """Density of (l(min(x, xp)), l(max(x, xp))) at (s, t).

    Factorizes as f^{min}(s) * f^{|x - xp|}(t - s); zero for t < s.

    Raises:
        ValueError: If x == xp or either time is not positive.
    """
    if not (x > 0 and xp > 0):
        raise ValueError(f"Times must be positive, got {x}, {xp}")
    if x == xp:
        raise ValueError("Degenerate pair x == xp: use the marginal density")
    lo, hi = min(x, xp), max(x, xp)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    family = model.family
    values = family.density(lo, s) * family.density(hi - lo, t - s)
    if model.monotone:
        values = np.where(t >= s, values, 0.0)
    return float(values) if np.ndim(values) == 0 else values


def _axis_pairs(model: FieldModel, k: int, a: float, b: float, n_nodes: int, spec: QuadratureSpec):
    """Nodes (T(a), T(b)) and weights for one axis, flattened."""
    sub = model.subs[k]
    if a == b:
        s, w = _rule(sub, a, n_nodes, spec)
        ts = model.transform(s)
        return ts, ts, w
    lo, hi = min(a, b), max(a, b)
    s, ws = _rule(sub, lo, n_nodes, spec)
    u, wu = _rule(sub, hi - lo, n_nodes, spec)
    first = np.repeat(s, u.size)
    second = first + np.tile(u, s.size)
    weights = np.outer(ws, wu).ravel()
    first, second = model.transform(first), model.transform(second)
    if a < b:
        return first, second, weights
    return second, first, weights


def cov_nonstationary_analytic(model: FieldModel, p, q, spec: Optional[QuadratureSpec] = None) -> float:
    """q_L(p, q) = E q_W(T(p), T(q)) for any covariance model (d = 2).

    Integrates over two, three or four independent variables depending on how
    many coordinates of p and q differ.
    """
    spec = spec or QuadratureSpec()
    pa, qa = _check_planar(model, p, q)
    n_variables = 2 + int(np.sum(pa != qa))
    n_nodes = spec.nodes_per_axis if n_variables <= 2 else spec.nodes_per_axis_4d
    p1, q1, w1 = _axis_pairs(model, 0, float(pa[0]), float(qa[0]), n_nodes, spec)
    p2, q2, w2 = _axis_pairs(model, 1, float(pa[1]), float(qa[1]), n_nodes, spec)
    logger.debug(f"Covariance quadrature over {n_variables} variables: {w1.size} x {w2.size} nodes")

    partial = []
    for start in range(0, w1.size, _ROW_CHUNK):
        rows = slice(start, start + _ROW_CHUNK)
        n_rows = w1[rows].size
        tp = np.stack(np.broadcast_arrays(p1[rows, None], p2[None, :]), axis=-1)
        tq = np.stack(np.broadcast_arrays(q1[rows, None], q2[None, :]), axis=-1)
        values = np.asarray(cov_eval(model.cov, tp.reshape(-1, 2), tq.reshape(-1, 2))).reshape(n_rows, -1)
        partial.append(float(w1[rows] @ (values @ w2)))
    return math.fsum(partial)


def cov_analytic(model: FieldModel, p, q, spec: Optional[QuadratureSpec] = None) -> float:
    """Dispatches to the stationary or the general formula."""
    if model.cov.kind == CovarianceKind.MATERN_STATIONARY and all(sub.monotone for sub in model.subs):
        return cov_stationary_analytic(model, p, q, spec)
    return cov_nonstationary_analytic(model, p, q, spec)


def cov_objective(model: FieldModel, points, empirical, spec: Optional[QuadratureSpec] = None) -> float:
    """Sum of squared differences between q_L on ``points`` and an empirical covariance matrix."""
    pts = model.check_points(points)
    emp = np.asarray(empirical, dtype=float)
    if emp.shape != (pts.shape[0], pts.shape[0]):
        raise ValueError(f"Empirical covariance must be {pts.shape[0]}x{pts.shape[0]}, got {emp.shape}")
    terms = []
    for i in range(pts.shape[0]):
        for j in range(i, pts.shape[0]):
            diff = cov_analytic(model, pts[i], pts[j], spec) - emp[i, j]
            terms.append(diff**2 if i == j else 2.0 * diff**2)
    return math.fsum(terms)
