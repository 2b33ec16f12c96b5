"""m-out-of-n bootstrap test for the existence of the p-th absolute moment.

H0: E|X|^p < inf. Under H0 the subsample means of the transformed sample obey
a central limit theorem, so the bootstrap distribution of the scaled means is
close to normal; the decision is a KS distance against that normal limit.

The default ``folded`` statistic uses Y = |X|^{p/2}, whose variance is finite
exactly when the p-th moment is, and compares |T_b| with the half-normal law.
The ``studentized`` statistic uses Y = |X|^p scaled by each resample's own
standard deviation and compares T_b with the standard normal law.
"""

import logging
import math
from typing import List

import numpy as np
from scipy.special import ndtr

from subfield.core.models import TestReport, Verdict
from subfield.moments.models import BootstrapConfig, BootstrapStatistic
from subfield.moments.trace import abs_power
from subfield.spectral.ks import critical_value, ks_statistic
from subfield.stochastics.rng import RngStream, parallel_map

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1000
MIN_SUBSAMPLE = 30
DEGENERATE_LIMIT = 0.01
N_CHUNKS = 10


def _half_normal_cdf(t: np.ndarray) -> np.ndarray:
    return 2.0 * ndtr(t) - 1.0


def _chunk_sizes(total: int, n_chunks: int) -> List[int]:
    base, extra = divmod(total, n_chunks)
    return [base + (1 if i < extra else 0) for i in range(n_chunks)]


def _resample_moments(rng: RngStream, y: np.ndarray, b: int, m: int, with_sd: bool):
    idx = rng.generator.integers(0, y.size, size=(b, m))
    draws = y[idx]
    means = draws.mean(axis=1)
    sds = draws.std(axis=1, ddof=1) if with_sd else None
    return means, sds


def bootstrap_moment_test(
    rng: RngStream,
    samples,
    p: float,
    cfg: BootstrapConfig,
    threads: int = 1,
) -> TestReport:
    """Tests H0: E|X|^p < inf on i.i.d. ``samples``; rejects iff D > c(alpha) / sqrt(B).

    Resamples are drawn in a fixed number of substream chunks, so the verdict
    does not depend on ``threads``.

    Raises:
        ValueError: If fewer than 1000 samples are given or m = floor(n^beta) < 30.
    """
    x = np.asarray(samples, dtype=float).reshape(-1)
    n = x.size
    if n < MIN_SAMPLES:
        raise ValueError(f"Bootstrap moment test needs at least {MIN_SAMPLES} samples, got {n}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    m = cfg.subsample_size(n)
    if m < MIN_SUBSAMPLE:
        raise ValueError(f"Subsample size floor(n^beta) = {m} is below {MIN_SUBSAMPLE}")
    b_total = cfg.n_resamples
    threshold = critical_value(cfg.alpha) / math.sqrt(b_total)

    def report(statistic: float, verdict: Verdict, note=None) -> TestReport:
        return TestReport(
            test=f"bootstrap_moment_{cfg.statistic.value}",
            statistic=statistic,
            threshold=threshold,
            alpha=cfg.alpha,
            verdict=verdict,
            n_samples=n,
            n_resamples=b_total,
            subsample_size=m,
            seed=rng.seed,
            stream_id=rng.stream_id,
            note=note,
        )

    folded = cfg.statistic == BootstrapStatistic.FOLDED
    y = abs_power(x, 0.5 * p if folded else p)
    if not np.all(np.isfinite(y)):
        logger.warning(f"|X|^{p} overflows double precision; rejecting finite-moment hypothesis")
        return report(math.inf, Verdict.REJECT, note="power overflow")
    y_mean = math.fsum(y) / n

    chunks = list(zip(rng.spawn(N_CHUNKS), _chunk_sizes(b_total, N_CHUNKS)))
    results = parallel_map(lambda task: _resample_moments(task[0], y, task[1], m, not folded), chunks, threads)
    means = np.concatenate([r[0] for r in results])

    if folded:
        s_n = float(np.std(y, ddof=1))
        if s_n == 0:
            logger.warning("Degenerate sample: zero spread of |X|^(p/2)")
            return report(0.0, Verdict.INCONCLUSIVE, note="zero sample deviation")
        t_stats = np.abs(math.sqrt(m) * (means - y_mean) / s_n)
        statistic = ks_statistic(t_stats, _half_normal_cdf)
    else:
        sds = np.concatenate([r[1] for r in results])
        degenerate = sds == 0
        if np.mean(degenerate) > DEGENERATE_LIMIT:
            logger.warning(f"{int(degenerate.sum())} of {b_total} resamples have zero deviation")
            return report(0.0, Verdict.INCONCLUSIVE, note="degenerate resamples")
        keep = ~degenerate
        t_stats = math.sqrt(m) * (means[keep] - y_mean) / sds[keep]
        statistic = ks_statistic(t_stats, ndtr)

    verdict = Verdict.REJECT if statistic > threshold else Verdict.ACCEPT
    logger.debug(f"Bootstrap p={p}: D={statistic:.4f}, threshold={threshold:.4f}, m={m} -> {verdict.value}")
    return report(statistic, verdict)
