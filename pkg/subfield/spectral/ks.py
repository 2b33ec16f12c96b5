"""Kolmogorov-Smirnov goodness-of-fit tests."""

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy.special import kolmogi

from subfield.core.models import TestReport, Verdict

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10


def critical_value(alpha: float) -> float:
    """Asymptotic c(alpha) with P(sqrt(n) D > c) = alpha (1.358 at 5%, 1.628 at 1%)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return float(kolmogi(alpha))


def ks_statistic(samples, target_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_emp - F| for a continuous target CDF."""
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    n = x.size
    if n == 0:
        raise ValueError("KS statistic needs at least one sample")
    f = np.asarray(target_cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(
    samples,
    target_cdf: Callable[[np.ndarray], np.ndarray],
    alpha: float = 0.05,
    seed: Optional[int] = None,
) -> TestReport:
    """One-sample KS test: reject iff D > c(alpha) / sqrt(n).

    Raises:
        ValueError: If fewer than 10 samples are given.
    """
    data = np.asarray(samples, dtype=float).reshape(-1)
    if data.size < MIN_SAMPLES:
        raise ValueError(f"KS test needs at least {MIN_SAMPLES} samples, got {data.size}")
    statistic = ks_statistic(data, target_cdf)
    threshold = critical_value(alpha) / math.sqrt(data.size)
    verdict = Verdict.REJECT if statistic > threshold else Verdict.ACCEPT
    logger.debug(f"KS: D={statistic:.5f}, threshold={threshold:.5f}, n={data.size} -> {verdict.value}")
    return TestReport(
        test="ks",
        statistic=statistic,
        threshold=threshold,
        alpha=alpha,
        verdict=verdict,
        n_samples=data.size,
        seed=seed,
    )


def ks_two_sample(a, b, alpha: float = 0.01) -> TestReport:
    """Two-sample KS test with the asymptotic threshold c(alpha) sqrt((n + m) / (n m))."""
    xa = np.sort(np.asarray(a, dtype=float).reshape(-1))
    xb = np.sort(np.asarray(b, dtype=float).reshape(-1))
    if xa.size < MIN_SAMPLES or xb.size < MIN_SAMPLES:
        raise ValueError(f"Two-sample KS needs at least {MIN_SAMPLES} samples per side")
    pooled = np.concatenate((xa, xb))
    fa = np.searchsorted(xa, pooled, side="right") / xa.size
    fb = np.searchsorted(xb, pooled, side="right") / xb.size
    statistic = float(np.max(np.abs(fa - fb)))
    threshold = critical_value(alpha) * math.sqrt((xa.size + xb.size) / (xa.size * xb.size))
    return TestReport(
        test="ks_two_sample",
        statistic=statistic,
        threshold=threshold,
        alpha=alpha,
        verdict=Verdict.REJECT if statistic > threshold else Verdict.ACCEPT,
        n_samples=xa.size + xb.size,
    )
