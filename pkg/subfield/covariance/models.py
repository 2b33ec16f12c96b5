"""Pydantic models for covariance quadrature and convergence studies."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from subfield.core.config import get_settings

MIN_COVERAGE = 1.0 - 1e-6


def _default_nodes() -> int:
    return get_settings().quadrature_nodes_2d


def _default_nodes_4d() -> int:
    return get_settings().quadrature_nodes_4d


def _default_quantile() -> float:
    return get_settings().truncation_quantile


class QuadratureSpec(BaseModel):
    """Tensor-trapezoid settings for the analytic covariance integrals.

    ``nodes_per_axis`` is used for 1-D and 2-D integrals, ``nodes_per_axis_4d``
    for the 3-D and 4-D branches.
    """

    nodes_per_axis: int = Field(default_factory=_default_nodes, ge=16)
    nodes_per_axis_4d: int = Field(default_factory=_default_nodes_4d, ge=16)
    truncation_quantile: float = Field(default_factory=_default_quantile, gt=0, lt=1)
    rule: Literal["trapezoid"] = "trapezoid"

    @field_validator("truncation_quantile")
    @classmethod
    def _covers_mass(cls, value: float) -> float:
        if value < MIN_COVERAGE:
            raise ValueError(f"truncation_quantile must cover at least {MIN_COVERAGE} of the mass")
        return value


class ConvergenceStudy(BaseModel):
    """RMSE of the Monte Carlo covariance estimator against the analytic value."""

    sample_sizes: List[int]
    rmse: List[float]
    n_repeats: int
    reference: float
    slope: Optional[float] = None

    @model_validator(mode="after")
    def _check_lengths(self) -> "ConvergenceStudy":
        if len(self.sample_sizes) != len(self.rmse):
            raise ValueError("sample_sizes and rmse must have equal length")
        if any(not (r == r and r != float("inf")) for r in self.rmse):
            raise ValueError("rmse values must be finite")
        return self
