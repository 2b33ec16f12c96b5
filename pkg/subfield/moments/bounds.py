"""Gaussian absolute moments and the moment-existence bound for subordinated fields."""

import logging
import math

from scipy.special import gammaln

from subfield.field.models import FieldModel
from subfield.grf.models import CovarianceKind
from subfield.moments.models import MomentBoundInput
from subfield.subordinators.models import SubordinatorKind, SubordinatorModel

logger = logging.getLogger(__name__)


def gaussian_abs_moment(p: float, sigma: float) -> float:
    """E|Z|^p = C_p sigma^p for Z ~ N(0, sigma^2), C_p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi).

    Raises:
        ValueError: If p <= -1 or sigma < 0.
    """
    if not p > -1:
        raise ValueError(f"p must be > -1, got {p}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return 0.0 if p > 0 else (1.0 if p == 0 else math.inf)
    log_cp = 0.5 * p * math.log(2.0) + gammaln(0.5 * (p + 1.0)) - 0.5 * math.log(math.pi)
    return math.exp(log_cp + p * math.log(sigma))


def moment_bound(bound_input: MomentBoundInput) -> float:
    """a = min over alpha^{(j)}_i != 0 of (eta_i - 1) / alpha^{(j)}_i; ``inf`` when the set is empty.

    L(x) then has finite p-th moments for 1 <= p < a.
    """
    candidates = [
        (eta - 1.0) / alpha
        for row in bound_input.alphas
        for alpha, eta in zip(row, bound_input.etas)
        if alpha != 0 and not math.isinf(eta)
    ]
    return min(candidates) if candidates else math.inf


def tail_exponent(sub: SubordinatorModel) -> float:
    """eta for one subordinator: dof + 1 for Student-t, ``inf`` for the light-tailed families."""
    if sub.kind == SubordinatorKind.STUDENT_T_UNIT_TIME:
        return float(sub.t_dof) + 1.0
    return math.inf


def bound_input_from_field(model: FieldModel) -> MomentBoundInput:
    """Variance-bound constants for the covariance kinds the library knows."""
    d = model.dim
    etas = [tail_exponent(sub) for sub in model.subs]
    kind = model.cov.kind
    if kind == CovarianceKind.BROWNIAN_SHEET:
        return MomentBoundInput(alphas=[[0.5] * d], etas=etas, coefficients=[1.0])
    if kind == CovarianceKind.SQRT_SCALED_STATIONARY:
        sigma = math.sqrt(model.cov.matern_sigma2)
        alphas = [[0.5 if i == j else 0.0 for i in range(d)] for j in range(d)]
        return MomentBoundInput(alphas=alphas, etas=etas, coefficients=[sigma] * d)
    return MomentBoundInput(alphas=[[0.0] * d], etas=etas, coefficients=[math.sqrt(model.cov.matern_sigma2)])


def moment_bound_for_field(model: FieldModel) -> float:
    bound = moment_bound(bound_input_from_field(model))
    logger.debug(f"Moment bound for {model.cov.kind.value} field: a = {bound}")
    return bound
