"""Types of the spectral module: characteristic functions, nu#, CDF tables."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from subfield.subordinators.models import SubordinatorModel


class Provenance(str, Enum):
    CLOSED_FORM = "closed_form"
    MIXTURE_QUADRATURE = "mixture_quadrature"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class CharFn:
    """An evaluable characteristic function xi -> E exp(i xi L(x)).

    ``func`` must accept a 1-D float array and return a complex array of the
    same shape.
    """

    func: Callable[[np.ndarray], np.ndarray]
    point: Tuple[float, ...]
    provenance: Provenance
    note: Optional[str] = None

    def eval(self, xi):
        """Evaluates at scalar or array frequencies."""
        xi_arr = np.asarray(xi, dtype=float)
        values = np.asarray(self.func(xi_arr.reshape(-1)), dtype=complex).reshape(xi_arr.shape)
        if values.ndim == 0:
            return complex(values)
        return values

    __call__ = eval


@dataclass(frozen=True)
class NuSharp:
    """Gaussian-smeared image of a subordinator's Levy measure (variance sigma2 * t)."""

    source: SubordinatorModel
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")


@dataclass
class CdfTable:
    """A CDF tabulated on an increasing grid, linearly interpolated."""

    z: np.ndarray
    cdf: np.ndarray
    pdf: Optional[np.ndarray] = field(default=None)

    def __call__(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.z, self.cdf, left=0.0, right=1.0)

    def quantile(self, q) -> np.ndarray:
        """Inverse by interpolation on the strictly increasing part of the table."""
        keep = np.concatenate(([True], np.diff(self.cdf) > 0))
        return np.interp(np.asarray(q, dtype=float), self.cdf[keep], self.z[keep])
