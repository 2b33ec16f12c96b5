"""Pydantic models for moment bounds, traces and bootstrap tests."""

import math
from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, Field, model_validator

from subfield.core.config import get_settings


class MomentBoundInput(BaseModel):
    """Constants of the standard-deviation bound sigma(t) <= sum_j c_j prod_i |t_i|^{alpha_ij}.

    ``etas`` are the tail exponents of the subordinator densities,
    f_i(t, z) <= C |z|^{-eta_i} for |z| > K; ``inf`` marks superpolynomial decay.
    The threshold K itself does not enter any computation.
    """

    alphas: List[List[float]] = Field(description="N x d matrix of exponents alpha^{(j)}_i.")
    etas: List[float] = Field(description="Per-axis tail exponents eta_i.")
    coefficients: List[float] = Field(description="Nonnegative c_j, one per row of alphas.")

    @model_validator(mode="after")
    def _check_shapes(self) -> "MomentBoundInput":
        d = len(self.etas)
        if len(self.coefficients) != len(self.alphas):
            raise ValueError("Need one coefficient per row of alphas")
        if any(len(row) != d for row in self.alphas):
            raise ValueError(f"Every row of alphas needs {d} entries")
        if any(a < 0 or math.isnan(a) for row in self.alphas for a in row):
            raise ValueError("alphas must be nonnegative")
        if any(c < 0 for c in self.coefficients):
            raise ValueError("coefficients must be nonnegative")
        if any(math.isnan(e) for e in self.etas):
            raise ValueError("etas must not be NaN")
        return self


class BootstrapStatistic(str, Enum):
    """``folded``: |T_b| of half-power means against the half-normal law.
    ``studentized``: T_b of p-th power means scaled by the resample deviation."""

    FOLDED = "folded"
    STUDENTIZED = "studentized"


def _default_beta() -> float:
    return get_settings().bootstrap_beta


def _default_resamples() -> int:
    return get_settings().bootstrap_resamples


class BootstrapConfig(BaseModel):
    """m-out-of-n bootstrap settings with m = floor(n ** beta)."""

    beta: float = Field(default_factory=_default_beta, gt=0, lt=1)
    n_resamples: int = Field(default_factory=_default_resamples, ge=200)
    alpha: float = Field(default=0.01, gt=0, lt=1, description="Significance level alpha_s.")
    statistic: BootstrapStatistic = BootstrapStatistic.FOLDED

    def subsample_size(self, n: int) -> int:
        return int(math.floor(n**self.beta))


class MomentTrace(BaseModel):
    """Running Monte Carlo estimates of E|L(x)|^p, one row per run."""

    p: float
    point: List[float]
    sizes: List[int]
    estimates: List[List[float]]

    @property
    def final_estimates(self) -> np.ndarray:
        return np.array([row[-1] for row in self.estimates])

    @property
    def relative_spread(self) -> float:
        """(max - min) / mean of the final estimates; 0 for an all-zero trace."""
        final = self.final_estimates
        centre = float(np.mean(final))
        if centre == 0:
            return 0.0
        return float((np.max(final) - np.min(final)) / centre)

    @property
    def max_min_ratio(self) -> float:
        final = self.final_estimates
        low = float(np.min(final))
        if low == 0:
            return 1.0 if float(np.max(final)) == 0 else math.inf
        return float(np.max(final) / low)
