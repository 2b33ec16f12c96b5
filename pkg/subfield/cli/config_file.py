"""Experiment configuration: TOML files, dotted overrides and per-experiment parameters."""

import logging

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from subfield.core.exceptions import ConfigError
from subfield.field.models import FieldModel
from subfield.fit.models import FitMode
from subfield.moments.models import BootstrapStatistic

logger = logging.getLogger(__name__)


class ExperimentName(str, Enum):
    SAMPLE_GRID = "sample-grid"
    POINTWISE_DIST = "pointwise-dist"
    CHARFN = "charfn"
    DENSITY = "density"
    COVARIANCE = "covariance"
    RMSE_STUDY = "rmse-study"
    FIT = "fit"
    MOMENT_TRACE = "moment-trace"
    MOMENT_TEST = "moment-test"
    CPA_SKEW = "cpa-skew"


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SampleGridParams(_Params):
    n_per_axis: List[int] = Field(default=[64, 64])


class PointwiseDistParams(_Params):
    points: List[List[float]] = Field(default=[[1.0, 1.0]])
    n_samples: int = Field(default=10_000, ge=10)
    alpha: float = Field(default=0.05, gt=0, lt=1)
    n_mixture: int = Field(default=20_000, ge=1, description="Draws for the mixture cf when no closed form exists.")


class CharfnParams(_Params):
    points: List[List[float]] = Field(default=[[1.0, 1.0]])
    xi_min: float = -10.0
    xi_max: float = 10.0
    n_xi: int = Field(default=41, ge=2)
    n_samples: int = Field(default=100_000, ge=1)
    include_nusharp: bool = True


class DensityParams(_Params):
    points: List[List[float]] = Field(default=[[1.0, 1.0]])
    n_nodes: Optional[int] = Field(default=None, ge=16)
    n_mixture: int = Field(default=20_000, ge=1)


class CovarianceParams(_Params):
    pairs: List[List[List[float]]] = Field(default=[[[1.0, 1.0], [2.0, 2.0]]], description="List of [p, q] pairs.")
    n_samples: int = Field(default=100_000, ge=1)
    nodes_per_axis: Optional[int] = Field(default=None, ge=16)
    nodes_per_axis_4d: Optional[int] = Field(default=None, ge=16)


class RmseStudyParams(_Params):
    p: List[float] = Field(default=[1.0, 1.0])
    q: List[float] = Field(default=[2.0, 2.0])
    sizes: List[int] = Field(default=[100, 1_000, 10_000, 100_000])
    n_repeats: int = Field(default=100, ge=1)


class FitParams(_Params):
    mode: FitMode = FitMode.CHARFN
    points: List[List[float]] = Field(default=[[0.1, 0.1], [0.1, 0.8], [0.7, 0.2], [1.0, 1.0]])
    theta_true: List[float] = Field(default=[3.0, 10.0, 3.0, 10.0, 2.0])
    theta0: List[float] = Field(default=[2.0, 12.0, 4.0, 9.0, 1.0])
    max_iter: Optional[int] = Field(default=None, ge=0)


class MomentTraceParams(_Params):
    point: List[float] = Field(default=[1.0, 1.0])
    p_values: List[float] = Field(default=[4.0, 6.0, 8.0])
    sizes: List[int] = Field(default=[1_000, 10_000, 100_000, 1_000_000])
    n_runs: int = Field(default=5, ge=1)


class MomentTestParams(_Params):
    point: List[float] = Field(default=[1.0, 1.0])
    p_values: List[float] = Field(default=[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    n_samples: int = Field(default=1_000_000, ge=1_000)
    beta: Optional[float] = Field(default=None, gt=0, lt=1)
    n_resamples: Optional[int] = Field(default=None, ge=200)
    alpha: float = Field(default=0.01, gt=0, lt=1)
    statistic: BootstrapStatistic = BootstrapStatistic.FOLDED


class CpaSkewParams(_Params):
    point: List[float] = Field(default=[1.0, 1.0])
    n_samples: int = Field(default=10_000, ge=10)
    eps: float = Field(default=1e-3, gt=0)


PARAMS_MODELS: Dict[ExperimentName, type] = {
    ExperimentName.SAMPLE_GRID: SampleGridParams,
    ExperimentName.POINTWISE_DIST: PointwiseDistParams,
    ExperimentName.CHARFN: CharfnParams,
    ExperimentName.DENSITY: DensityParams,
    ExperimentName.COVARIANCE: CovarianceParams,
    ExperimentName.RMSE_STUDY: RmseStudyParams,
    ExperimentName.FIT: FitParams,
    ExperimentName.MOMENT_TRACE: MomentTraceParams,
    ExperimentName.MOMENT_TEST: MomentTestParams,
    ExperimentName.CPA_SKEW: CpaSkewParams,
}

NEEDS_MODEL = frozenset(PARAMS_MODELS) - {ExperimentName.FIT}


class ExperimentConfig(BaseModel):
    """A fully resolved experiment run: which experiment, on which field, with which seed."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    model: Optional[FieldModel] = None
    seed: int = Field(default=0, ge=0)
    output_dir: Optional[str] = None
    threads: Optional[int] = Field(default=None, ge=1)
    params: Dict[str, Any] = Field(default_factory=dict)

    _params: Optional[BaseModel] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _resolve_params(self) -> "ExperimentConfig":
        if self.experiment in NEEDS_MODEL and self.model is None:
            raise ValueError(f"Experiment '{self.experiment.value}' needs a [model] section")
        self._params = PARAMS_MODELS[self.experiment].model_validate(self.params)
        return self

    @property
    def typed_params(self) -> BaseModel:
        return self._params


def parse_value(text: str) -> Any:
    """Parses an override value with TOML syntax; bare words stay strings."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Applies ``dotted.key=value`` overrides in place and returns ``raw``.

    Raises:
        ConfigError: If an override is not of the form key=value or walks into a non-table.
    """
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override '{item}' must look like key=value")
        parts = key.strip().split(".")
        node = raw
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"Override '{item}': '{part}' is not a table")
        node[parts[-1]] = parse_value(value.strip())
        logger.debug(f"Override {key.strip()} = {node[parts[-1]]!r}")
    return raw


def read_config_file(path: Path) -> Dict[str, Any]:
    """Reads a TOML experiment file into a plain dict.

    Raises:
        ConfigError: If the file is missing or not valid TOML.
    """
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"Invalid TOML in {path}: {exc}") from exc


def load_experiment_config(
    experiment: str,
    path: Optional[Path] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
    output_dir: Optional[str] = None,
    threads: Optional[int] = None,
) -> ExperimentConfig:
    """Resolves file < overrides < flags into a validated :class:`ExperimentConfig`.

    Raises:
        ConfigError: For unreadable files or malformed overrides.
        pydantic.ValidationError: For schema violations.
    """
    raw = read_config_file(path) if path is not None else {}
    file_experiment = raw.get("experiment")
    if file_experiment is not None and file_experiment != experiment:
        logger.warning(f"Config file names experiment '{file_experiment}', running '{experiment}'")
    apply_overrides(raw, overrides)
    raw["experiment"] = experiment
    for key, value in (("seed", seed), ("output_dir", output_dir), ("threads", threads)):
        if value is not None:
            raw[key] = value
    return ExperimentConfig.model_validate(raw)
