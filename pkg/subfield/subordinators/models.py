"""Pydantic models for subordinators and their sampled paths."""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, model_validator


class SubordinatorKind(str, Enum):
    GAMMA = "gamma"
    POISSON = "poisson"
    COMPOUND_POISSON_APPROX = "compound_poisson_approx"
    STUDENT_T_UNIT_TIME = "student_t_unit_time"


class SubordinatorModel(BaseModel):
    """Parameters of one Levy process time-changing a field axis.

    Only the fields relevant to ``kind`` are used. A compound-Poisson
    approximation built from configuration uses the Gamma Levy measure given by
    ``gamma_shape``/``gamma_rate``; :func:`cpa_build` can attach an arbitrary
    Levy density instead.
    """

    kind: SubordinatorKind
    gamma_shape: Optional[float] = Field(default=None, gt=0, description="a_G of a Gamma process.")
    gamma_rate: Optional[float] = Field(default=None, gt=0, description="b_G of a Gamma process.")
    poisson_lambda: Optional[float] = Field(default=None, gt=0, description="Poisson jump intensity.")
    drift: float = Field(default=0.0, ge=0, description="Deterministic drift gamma.")
    cpa_eps: Optional[float] = Field(default=None, gt=0, description="CPA jump truncation level.")
    t_dof: Optional[float] = Field(default=None, gt=0, description="Student-t degrees of freedom.")

    _levy_density: Optional[Callable[[np.ndarray], np.ndarray]] = PrivateAttr(default=None)
    _family: Optional[object] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_kind_parameters(self) -> "SubordinatorModel":
        if self.kind == SubordinatorKind.GAMMA:
            if self.gamma_shape is None or self.gamma_rate is None:
                raise ValueError("Gamma subordinator needs gamma_shape and gamma_rate")
        elif self.kind == SubordinatorKind.POISSON:
            if self.poisson_lambda is None:
                raise ValueError("Poisson subordinator needs poisson_lambda")
        elif self.kind == SubordinatorKind.COMPOUND_POISSON_APPROX:
            if self.cpa_eps is None:
                raise ValueError("Compound Poisson approximation needs cpa_eps")
        elif self.kind == SubordinatorKind.STUDENT_T_UNIT_TIME:
            if self.t_dof is None:
                raise ValueError("Student-t process needs t_dof")
            if self.drift != 0:
                raise ValueError("Student-t process does not take a drift")
        return self

    @classmethod
    def gamma(cls, shape: float, rate: float, drift: float = 0.0) -> "SubordinatorModel":
        return cls(kind=SubordinatorKind.GAMMA, gamma_shape=shape, gamma_rate=rate, drift=drift)

    @classmethod
    def poisson(cls, intensity: float, drift: float = 0.0) -> "SubordinatorModel":
        return cls(kind=SubordinatorKind.POISSON, poisson_lambda=intensity, drift=drift)

    @classmethod
    def student_t(cls, dof: float) -> "SubordinatorModel":
        return cls(kind=SubordinatorKind.STUDENT_T_UNIT_TIME, t_dof=dof)

    @property
    def monotone(self) -> bool:
        return self.kind != SubordinatorKind.STUDENT_T_UNIT_TIME

    @property
    def family(self):
        """The cached :class:`SubordinatorFamily` implementing this model."""
        if self._family is None:
            # Local import: families import this module for their types.
            from subfield.subordinators.service import build_family

            self._family = build_family(self)
        return self._family


@dataclass
class SubordinatorPath:
    """A sampled skeleton of a subordinator on an increasing time grid."""

    grid: np.ndarray
    values: np.ndarray

    def __call__(self, t) -> np.ndarray:
        """Evaluates the cadlag skeleton: the value at the last grid time <= t.

        Times before ``grid[0]`` evaluate to 0 when ``grid[0] > 0`` (l(0) = 0).
        """
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.grid, t, side="right") - 1
        vals = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], 0.0)
        if vals.ndim == 0:
            return float(vals)
        return vals
