"""Pydantic models for subordinated Gaussian random fields."""

from dataclasses import dataclass
from typing import List

import numpy as np
from pydantic import BaseModel, Field, model_validator

from subfield.grf.models import CovarianceModel
from subfield.subordinators.models import SubordinatorModel


class FieldModel(BaseModel):
    """L(x) = W(l_1(x_1), ..., l_d(x_d)), optionally with |l_k| (``abs_mode``)."""

    cov: CovarianceModel
    subs: List[SubordinatorModel]
    horizon: List[float] = Field(description="Upper corner T of the domain [0, T].")
    abs_mode: bool = False

    @model_validator(mode="after")
    def _check_dimensions(self) -> "FieldModel":
        d = self.cov.dim
        if len(self.subs) != d or len(self.horizon) != d:
            raise ValueError(
                f"Need one subordinator and one horizon per axis: dim={d}, "
                f"subs={len(self.subs)}, horizon={len(self.horizon)}"
            )
        if d < 2:
            raise ValueError("Subordinated fields need d >= 2")
        if any(not t > 0 for t in self.horizon):
            raise ValueError("Horizon entries must be positive")
        if not self.abs_mode and any(not sub.monotone for sub in self.subs):
            raise ValueError("abs_mode must be enabled when a non-monotone process time-changes an axis")
        return self

    @property
    def dim(self) -> int:
        return self.cov.dim

    def check_points(self, points) -> np.ndarray:
        """Validates that points lie in [0, T] and returns them as an (k, d) array."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[-1] != self.dim:
            raise ValueError(f"Points must have {self.dim} coordinates, got shape {pts.shape}")
        upper = np.asarray(self.horizon)
        if np.any(pts < 0) or np.any(pts > upper * (1 + 1e-12)):
            raise ValueError(f"Points must lie in [0, {self.horizon}]")
        return pts

    def transform(self, times: np.ndarray) -> np.ndarray:
        """Applies the absolute value in abs_mode."""
        return np.abs(times) if self.abs_mode else times


@dataclass
class GridRealization:
    """One field realization on a regular grid (``values[i, j, ...]`` at axes[0][i], axes[1][j], ...)."""

    axes: List[np.ndarray]
    values: np.ndarray
