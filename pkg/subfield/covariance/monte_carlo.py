"""Monte Carlo covariance estimation and RMSE convergence studies."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from subfield.covariance.analytic import cov_analytic
from subfield.covariance.models import ConvergenceStudy, QuadratureSpec
from subfield.field.models import FieldModel
from subfield.field.sampling import sample_pair
from subfield.stochastics.rng import RngStream, parallel_map

logger = logging.getLogger(__name__)

_BLOCK = 100_000


def cov_mc_estimate(rng: RngStream, model: FieldModel, p, q, M: int) -> float:
    """(1/M) sum_i L(p)^(i) L(q)^(i) with shared subordinator paths in each draw."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    sums = []
    remaining = M
    while remaining > 0:
        n = min(remaining, _BLOCK)
        pairs = sample_pair(rng, model, p, q, n)
        sums.append(float(np.sum(pairs[:, 0] * pairs[:, 1])))
        remaining -= n
    return math.fsum(sums) / M


def loglog_slope(sizes: Sequence[int], rmse: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(rmse) against log(M); None when undefined."""
    r = np.asarray(rmse, dtype=float)
    if len(sizes) < 2 or np.any(r <= 0):
        return None
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(r), 1)
    return float(slope)


def rmse_convergence_study(
    rng: RngStream,
    model: FieldModel,
    p,
    q,
    sizes: Sequence[int],
    n_repeats: int,
    spec: Optional[QuadratureSpec] = None,
    threads: int = 1,
    reference: Optional[float] = None,
) -> ConvergenceStudy:
    """RMSE over ``n_repeats`` independent estimators for each sample size.

    Each (size, repeat) pair runs on its own substream, so results do not
    depend on ``threads``.
    """
    sizes = [int(m) for m in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if n_repeats < 1:
        raise ValueError(f"n_repeats must be >= 1, got {n_repeats}")
    if reference is None:
        reference = cov_analytic(model, p, q, spec)
    logger.info(f"RMSE study at p={p}, q={q}: reference {reference:.6g}, sizes {sizes}, {n_repeats} repeats")

    rmse = []
    for i, m in enumerate(sizes):
        streams = [rng.substream(i * n_repeats + r) for r in range(n_repeats)]
        estimates = parallel_map(lambda s: cov_mc_estimate(s, model, p, q, m), streams, threads)
        sq = math.fsum((e - reference) ** 2 for e in estimates) / n_repeats
        rmse.append(math.sqrt(sq))
        logger.debug(f"M={m}: RMSE={rmse[-1]:.4e}")

    slope = loglog_slope(sizes, rmse) if n_repeats > 1 else None
    return ConvergenceStudy(sample_sizes=sizes, rmse=rmse, n_repeats=n_repeats, reference=reference, slope=slope)
