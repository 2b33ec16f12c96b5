"""Sampling of subordinated Gaussian random fields.

Each realization subordinates first and then draws W exactly at the random
transformed locations from its finite-dimensional Gaussian law.
"""

import logging
from typing import Sequence

import numpy as np

from subfield.core.config import get_settings
from subfield.field.models import FieldModel, GridRealization
from subfield.grf.covariance import cov_eval, variance_fn
from subfield.grf.sampling import grf_sample_at
from subfield.stochastics.mvn import cholesky_2x2_batch
from subfield.stochastics.rng import RngStream
from subfield.subordinators.service import marginal_sample, path_sample

logger = logging.getLogger(__name__)


def transformed_points(rng: RngStream, model: FieldModel, points) -> np.ndarray:
    """Samples the subordinators once and maps each point to W's coordinates.

    One path per axis is drawn on the sorted distinct coordinates, so points
    sharing a coordinate share the subordinator value.
    """
    pts = model.check_points(points)
    out = np.empty_like(pts)
    for k, sub in enumerate(model.subs):
        coords, inverse = np.unique(pts[:, k], return_inverse=True)
        path = path_sample(rng, sub, coords)
        out[:, k] = path.values[np.asarray(inverse).reshape(-1)]
    return model.transform(out)


def sample_at_points(rng: RngStream, model: FieldModel, points) -> np.ndarray:
    """Draws (L(p_1), ..., L(p_k)) jointly.

    Raises:
        ValueError: If points are outside the domain.
        FactorizationError: Propagated from the Gaussian draw.
        UnsupportedOperationError: For unsupported subordinator times.
    """
    return grf_sample_at(rng, model.cov, transformed_points(rng, model, points))


def grid_axes(model: FieldModel, n_per_axis: Sequence[int]):
    """Right cell endpoints T_k * (i + 1) / n_k of a regular grid, per axis."""
    if len(n_per_axis) != model.dim or any(n < 1 for n in n_per_axis):
        raise ValueError(f"Need {model.dim} positive grid sizes, got {list(n_per_axis)}")
    return [t * np.arange(1, n + 1) / n for t, n in zip(model.horizon, n_per_axis)]


def sample_grid(rng: RngStream, model: FieldModel, n_per_axis: Sequence[int]) -> GridRealization:
    """Draws one realization on a regular grid over (0, T].

    Raises:
        ValueError: If the grid has more points than ``Settings.max_grid_points``.
    """
    total = int(np.prod(n_per_axis))
    cap = get_settings().max_grid_points
    if total > cap:
        raise ValueError(f"Grid of {total} points exceeds the joint-sampling cap of {cap}")
    axes = grid_axes(model, n_per_axis)
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    values = sample_at_points(rng, model, points)
    logger.debug(f"Sampled grid realization with shape {tuple(n_per_axis)}")
    return GridRealization(axes=axes, values=values.reshape(tuple(n_per_axis)))


def sample_transformed(rng: RngStream, model: FieldModel, x, n: int) -> np.ndarray:
    """Draws n i.i.d. transformed locations (|)l_1(x_1), ..., l_d(x_d)(|); shape (n, d)."""
    point = model.check_points(x)[0]
    cols = [marginal_sample(rng, sub, float(t), size=n) for sub, t in zip(model.subs, point)]
    return model.transform(np.stack(cols, axis=-1))


def sample_pointwise(rng: RngStream, model: FieldModel, x, n: int) -> np.ndarray:
    """Draws n i.i.d. copies of L(x) at a single point."""
    locations = sample_transformed(rng, model, x, n)
    sd = np.sqrt(np.asarray(variance_fn(model.cov, locations)))
    return sd * rng.generator.standard_normal(n)


def sample_pair(rng: RngStream, model: FieldModel, p, q, n: int) -> np.ndarray:
    """Draws n i.i.d. copies of (L(p), L(q)) with shared subordinator paths; shape (n, 2)."""
    pa = model.check_points(p)[0]
    qa = model.check_points(q)[0]
    tp = np.empty((n, model.dim))
    tq = np.empty((n, model.dim))
    for k, sub in enumerate(model.subs):
        lo, hi = sorted((float(pa[k]), float(qa[k])))
        first = marginal_sample(rng, sub, lo, size=n)
        if hi == lo:
            second = first
        else:
            second = first + marginal_sample(rng, sub, hi - lo, size=n)
        if pa[k] <= qa[k]:
            tp[:, k], tq[:, k] = first, second
        else:
            tp[:, k], tq[:, k] = second, first
    tp = model.transform(tp)
    tq = model.transform(tq)
    var_p = np.asarray(variance_fn(model.cov, tp))
    var_q = np.asarray(variance_fn(model.cov, tq))
    cov_pq = np.asarray(cov_eval(model.cov, tp, tq))
    l11, l21, l22 = cholesky_2x2_batch(var_p, cov_pq, var_q)
    z = rng.generator.standard_normal((n, 2))
    return np.stack([l11 * z[:, 0], l21 * z[:, 0] + l22 * z[:, 1]], axis=-1)
