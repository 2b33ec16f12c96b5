"""Types of the parameter-fitting module."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

PARAMETER_NAMES = ("a1", "b1", "a2", "b2", "sigma")


class FitMode(str, Enum):
    CHARFN = "charfn"
    DENSITY = "density"


@dataclass
class FitProblem:
    """Targets of a Gamma x Gamma subordinated-field fit at a set of points.

    ``grids[j]`` holds the frequencies (charfn mode) or the z nodes (density
    mode) at ``points[j]`` and ``targets[j]`` the matching target values.
    Density mode also fixes the inversion cut-off ``xi_max[j]`` per point so
    the residual stays a smooth function of the parameters.
    """

    points: np.ndarray
    mode: FitMode
    grids: List[np.ndarray]
    targets: List[np.ndarray]
    theta0: np.ndarray
    xi_max: Optional[List[float]] = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.theta0 = np.asarray(self.theta0, dtype=float)
        if self.points.shape[0] == 0:
            raise ValueError("FitProblem needs at least one point")
        if len(self.grids) != self.points.shape[0] or len(self.targets) != self.points.shape[0]:
            raise ValueError("Need one grid and one target per point")
        for grid, target in zip(self.grids, self.targets):
            if np.any(np.diff(grid) <= 0):
                raise ValueError("Fit grids must be strictly increasing")
            if np.shape(grid) != np.shape(target):
                raise ValueError("Each target must match its grid")
        if self.theta0.shape != (len(PARAMETER_NAMES),):
            raise ValueError(f"theta0 must hold {PARAMETER_NAMES}, got shape {self.theta0.shape}")
        if np.any(self.theta0 < 0) or not np.all(np.isfinite(self.theta0)):
            raise ValueError("theta0 must be finite and componentwise >= 0")
        if self.mode == FitMode.DENSITY and (self.xi_max is None or len(self.xi_max) != self.points.shape[0]):
            raise ValueError("Density fits need one xi_max per point")


class FitResult(BaseModel):
    """Outcome of a fit.

    ``trajectory`` starts at the residual norm at theta0. Charfn fits then list
    the norm where their final LM stage starts; every fit ends with the norm
    after each accepted step of that stage.
    """

    theta_hat: List[float]
    residual_norm: float = Field(ge=0)
    n_iterations: int = Field(ge=0)
    converged: bool
    trajectory: List[float]

    def parameters(self) -> dict:
        return dict(zip(PARAMETER_NAMES, self.theta_hat))
