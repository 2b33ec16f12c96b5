"""Joint sampling of a Gaussian random field at finite point sets."""

import logging

import numpy as np

from subfield.grf.covariance import cov_matrix
from subfield.grf.models import CovarianceModel
from subfield.stochastics.mvn import mvn_factorize, mvn_sample
from subfield.stochastics.rng import RngStream

logger = logging.getLogger(__name__)


def grf_sample_at(rng: RngStream, model: CovarianceModel, points) -> np.ndarray:
    """Draws (W(p_1), ..., W(p_k)) jointly.

    Exactly equal points are collapsed before factorization and re-expanded
    afterwards, so duplicates receive identical values.

    Args:
        rng: Random stream.
        model: Covariance model of W.
        points: Array of shape (k, d) with nonnegative coordinates.

    Returns:
        A vector of length k.

    Raises:
        FactorizationError: If the covariance cannot be factorized.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("grf_sample_at needs at least one point")
    unique, inverse = np.unique(pts, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    if unique.shape[0] < pts.shape[0]:
        logger.debug(f"Collapsed {pts.shape[0]} points to {unique.shape[0]} distinct locations")
    factor = mvn_factorize(cov_matrix(model, unique))
    values = mvn_sample(rng, np.zeros(unique.shape[0]), factor)
    return values[inverse]
