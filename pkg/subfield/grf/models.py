"""Pydantic models for Gaussian random field covariance structures."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class CovarianceKind(str, Enum):
    MATERN_STATIONARY = "matern_stationary"
    BROWNIAN_SHEET = "brownian_sheet"
    SQRT_SCALED_STATIONARY = "sqrt_scaled_stationary"


class CovarianceModel(BaseModel):
    """A centered Gaussian field's covariance on the nonnegative orthant.

    ``matern_*`` parameters are used by the two stationary-based kinds and
    ignored by the Brownian sheet (covariance ``prod_i min(x_i, y_i)``).
    """

    model_config = ConfigDict(frozen=True)

    kind: CovarianceKind
    matern_nu: float = Field(default=1.5, gt=0, description="Matern smoothness.")
    matern_r: float = Field(default=1.0, gt=0, description="Matern correlation length.")
    matern_sigma2: float = Field(default=1.0, gt=0, description="Matern variance rho(0).")
    dim: int = Field(default=2, ge=1, description="Spatial dimension d.")

    @property
    def is_stationary(self) -> bool:
        return self.kind == CovarianceKind.MATERN_STATIONARY

    @property
    def satisfies_linear_variance(self) -> bool:
        """True when the pointwise variance is sigma^2 * (x_1 + ... + x_d)."""
        return self.kind == CovarianceKind.SQRT_SCALED_STATIONARY
