"""Configuration module for subfield.

This module handles the runtime and numerical configuration using
pydantic-settings. Every tolerance and default budget used by the numerical
modules lives here so it can be tuned from the environment or a `.env` file
(variables prefixed with ``SUBFIELD_``).
"""

import logging
from typing import List

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Explicitly load .env file BEFORE BaseSettings reads environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings class.

    Settings are loaded from environment variables with appropriate defaults.
    """

    # Runtime settings
    log_level: str = Field(default="INFO", description="Root log level (DEBUG, INFO, WARNING, ...).")
    output_dir: str = Field(default="./results", description="Default directory for experiment artifacts.")
    threads: int = Field(default=1, ge=1, description="Default cap on worker threads for Monte Carlo loops.")

    # --- Multivariate normal factorization ---
    jitter_ladder: List[float] = Field(
        default=[0.0, 1e-12, 1e-10, 1e-8],
        description="Diagonal jitter levels tried in order, relative to the mean diagonal of the covariance.",
    )
    recompose_tolerance: float = Field(
        default=1e-8, description="Maximum relative Frobenius error of L L^T against the jittered covariance."
    )
    max_grid_points: int = Field(default=10_000, description="Largest joint point set sample_grid will factorize.")

    # --- Fourier inversion ---
    gil_pelaez_nodes: int = Field(default=2**14, description="Trapezoid nodes on (0, xi_max].")
    gil_pelaez_xi_cap: float = Field(default=1e4, description="Upper cap for the truncation frequency xi_max.")
    cf_tail_tolerance: float = Field(default=1e-8, description="xi_max is the first frequency where |cf| falls below this.")
    heavy_tail_warning: float = Field(default=1e-6, description="Warn when |cf(xi_max)| stays above this level.")
    cdf_table_nodes: int = Field(default=2**12, description="Nodes of the tabulated CDF used as KS target.")
    cdf_table_quantile: float = Field(default=1e-6, description="Tail mass left outside the tabulated CDF on each side.")

    # --- Subordinators ---
    cpa_table_nodes: int = Field(default=2048, description="Log-spaced nodes of the CPA jump-law inversion table.")
    cpa_tail_tolerance: float = Field(
        default=1e-12, description="Relative Levy mass beyond the CPA table end."
    )

    # --- Covariance quadrature ---
    quadrature_nodes_2d: int = Field(default=256, description="Trapezoid nodes per axis for 1-D/2-D covariance integrals.")
    quadrature_nodes_4d: int = Field(default=64, description="Trapezoid nodes per axis for 3-D/4-D covariance integrals.")
    truncation_quantile: float = Field(default=1.0 - 1e-6, description="Upper quantile each marginal is integrated to.")
    poisson_atom_quantile: float = Field(default=1.0 - 1e-10, description="Poisson atoms are summed up to this quantile.")

    # --- Moment testing ---
    bootstrap_beta: float = Field(default=0.5, description="Subsample exponent: m = floor(n ** beta).")
    bootstrap_resamples: int = Field(default=1000, description="Number of m-out-of-n bootstrap resamples.")

    # --- Fitting ---
    fit_xi_nodes: int = Field(default=64, description="Frequency nodes of the characteristic-function fit.")
    fit_xi_max: float = Field(default=20.0, description="Largest frequency of the characteristic-function fit.")
    fit_z_nodes: int = Field(default=128, description="Spatial nodes of the density fit.")
    fit_z_quantile: float = Field(default=1e-4, description="Target tail mass excluded from the density-fit grid.")
    fit_iterations_charfn: int = Field(default=50, description="LM iteration budget for characteristic-function fits.")
    fit_iterations_density: int = Field(default=5, description="LM iteration budget for density fits.")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SUBFIELD_",
        extra="ignore",
    )


def get_settings() -> Settings:
    """Get application settings.

    Loads settings from environment variables and the `.env` file.

    Returns:
        Settings: A fresh settings instance.
    """
    return Settings()
