"""Running Monte Carlo estimates of pointwise absolute moments."""

import logging
import math
from typing import Sequence

import numpy as np

from subfield.field.models import FieldModel
from subfield.field.sampling import sample_pointwise
from subfield.moments.models import MomentTrace
from subfield.stochastics.rng import RngStream, parallel_map

logger = logging.getLogger(__name__)

_BLOCK = 250_000


def abs_power(samples, p: float) -> np.ndarray:
    """|x|^p evaluated as exp(p log|x|); overflow yields ``inf`` and zeros stay zero."""
    x = np.abs(np.asarray(samples, dtype=float))
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(p * np.log(x))


def _run_trace(rng: RngStream, model: FieldModel, x, p: float, sizes: Sequence[int]) -> list:
    estimates = []
    partial = []
    drawn = 0
    for m in sizes:
        while drawn < m:
            n = min(m - drawn, _BLOCK)
            partial.append(math.fsum(abs_power(sample_pointwise(rng, model, x, n), p)))
            drawn += n
        estimates.append(math.fsum(partial) / m)
    return estimates


def moment_trace(
    rng: RngStream,
    model: FieldModel,
    x,
    p: float,
    sizes: Sequence[int],
    n_runs: int,
    threads: int = 1,
) -> MomentTrace:
    """Estimates E|L(x)|^p after each of the increasing sample counts in ``sizes``.

    Run r draws from substream r and reuses its earlier samples, so each row
    is the running estimator of one Monte Carlo run.

    Raises:
        ValueError: If p < 1, sizes are not strictly increasing, or n_runs < 1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    sizes = [int(m) for m in sizes]
    if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be positive and strictly increasing, got {sizes}")
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    point = model.check_points(x)[0]
    rows = parallel_map(lambda s: _run_trace(s, model, point, p, sizes), rng.spawn(n_runs), threads)
    trace = MomentTrace(p=p, point=point.tolist(), sizes=sizes, estimates=rows)
    logger.info(f"Moment trace p={p} at {tuple(point)}: relative spread {trace.relative_spread:.3g} over {n_runs} runs")
    return trace
