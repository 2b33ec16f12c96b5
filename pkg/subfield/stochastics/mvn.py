"""Multivariate normal factorization and sampling."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from subfield.core.config import get_settings
from subfield.core.exceptions import FactorizationError
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)

MAX_RELATIVE_JITTER = 1e-6


@dataclass(frozen=True)
class MvnFactor:
    """Lower Cholesky factor of ``cov + jitter_used * I``."""

    dim: int
    lower_factor: np.ndarray
    jitter_used: float


def _check_symmetric(cov: np.ndarray) -> None:
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] < 1:
        raise ValueError(f"Covariance must be a nonempty square matrix, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise ValueError("Covariance contains non-finite entries")
    scale = max(np.max(np.abs(cov)), 1e-300)
    if np.max(np.abs(cov - cov.T)) > 1e-12 * scale:
        raise ValueError("Covariance matrix is not symmetric")


def mvn_factorize(cov: np.ndarray, jitter_ladder: Optional[Sequence[float]] = None) -> MvnFactor:
    """Cholesky-factorizes a covariance matrix, escalating diagonal jitter.

    Jitter levels are relative to the mean diagonal. The first level that
    yields a factorization reproducing ``cov + jitter*I`` within the configured
    relative Frobenius tolerance is used.

    Args:
        cov: Symmetric positive semidefinite matrix.
        jitter_ladder: Relative jitter levels; defaults to ``Settings.jitter_ladder``.

    Returns:
        The factor together with the absolute jitter applied.

    Raises:
        ValueError: If ``cov`` is not a symmetric finite square matrix.
        FactorizationError: If every ladder level fails.
    """
    cov = np.asarray(cov, dtype=float)
    _check_symmetric(cov)
    settings = get_settings()
    ladder = list(settings.jitter_ladder if jitter_ladder is None else jitter_ladder)
    dim = cov.shape[0]
    scale = float(np.trace(cov)) / dim
    cov_norm = np.linalg.norm(cov)

    if cov_norm == 0.0:
        return MvnFactor(dim=dim, lower_factor=np.zeros_like(cov), jitter_used=0.0)

    for level in ladder:
        jitter = level * scale
        if jitter > MAX_RELATIVE_JITTER * scale:
            break
        jittered = cov + jitter * np.eye(dim)
        try:
            lower = np.linalg.cholesky(jittered)
        except np.linalg.LinAlgError:
            continue
        error = np.linalg.norm(lower @ lower.T - jittered) / cov_norm
        if error <= settings.recompose_tolerance:
            if jitter > 0:
                logger.debug(f"Factorized {dim}x{dim} covariance with jitter {jitter:.3e}")
            return MvnFactor(dim=dim, lower_factor=lower, jitter_used=jitter)

    raise FactorizationError(
        f"Cholesky factorization of a {dim}x{dim} covariance failed for all jitter levels {ladder}",
        max_jitter=max(ladder) * scale if ladder else 0.0,
    )


def mvn_sample(rng: RngStream, mean: np.ndarray, factor: MvnFactor) -> np.ndarray:
    """Draws ``mean + L z`` with z i.i.d. standard normal."""
    mean = np.asarray(mean, dtype=float).reshape(-1)
    if mean.shape[0] != factor.dim:
        raise ValueError(f"Mean has dimension {mean.shape[0]}, factor has {factor.dim}")
    z = rng.generator.standard_normal(factor.dim)
    return mean + factor.lower_factor @ z


def mvn_sample_batch(rng: RngStream, mean: np.ndarray, factor: MvnFactor, n: int) -> np.ndarray:
    """Draws ``n`` i.i.d. vectors under one factor, shape ``(n, dim)``."""
    mean = np.asarray(mean, dtype=float).reshape(-1)
    if mean.shape[0] != factor.dim:
        raise ValueError(f"Mean has dimension {mean.shape[0]}, factor has {factor.dim}")
    z = rng.generator.standard_normal((n, factor.dim))
    return mean + z @ factor.lower_factor.T


def cholesky_2x2_batch(var_a: np.ndarray, cov_ab: np.ndarray, var_b: np.ndarray):
    """Elementwise Cholesky factors of many 2x2 covariance matrices.

    Returns ``(l11, l21, l22)`` with the Schur complement clipped at zero, so
    perfectly correlated pairs (coincident points) yield ``l22 = 0``.
    """
    var_a = np.asarray(var_a, dtype=float)
    cov_ab = np.asarray(cov_ab, dtype=float)
    var_b = np.asarray(var_b, dtype=float)
    l11 = np.sqrt(np.clip(var_a, 0.0, None))
    positive = l11 > 0
    safe = np.where(positive, l11, 1.0)
    l21 = np.where(positive, cov_ab / safe, 0.0)
    l22 = np.sqrt(np.clip(var_b - l21**2, 0.0, None))
    return l11, l21, l22
