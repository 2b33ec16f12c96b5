"""Tests for experiment configuration files, overrides and artifact formatting."""

import json
from enum import Enum
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from subfield.cli.artifacts import ArtifactWriter, format_cell, sha256_of_file
from subfield.cli.config_file import (
    ExperimentName,
    FitParams,
    SampleGridParams,
    apply_overrides,
    load_experiment_config,
    parse_value,
    read_config_file,
)
from subfield.core.exceptions import ConfigError
from subfield.grf.models import CovarianceKind
from subfield.subordinators.models import SubordinatorKind

CONFIGS_DIR = Path(__file__).resolve().parents[2] / "configs"

CONFIG_TEXT = """
experiment = "sample-grid"
seed = 7

[model]
horizon = [2.0, 2.0]

[model.cov]
kind = "brownian_sheet"

[[model.subs]]
kind = "gamma"
gamma_shape = 4.0
gamma_rate = 10.0

[[model.subs]]
kind = "poisson"
poisson_lambda = 2.0

[params]
n_per_axis = [4, 3]
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "grid.toml"
    path.write_text(CONFIG_TEXT)
    return path


def test_parse_value():
    assert parse_value("3") == 3
    assert parse_value("1e-3") == 0.001
    assert parse_value("[1, 2]") == [1, 2]
    assert parse_value("true") is True
    assert parse_value('"text"') == "text"
    assert parse_value("density") == "density"


def test_apply_overrides_nested():
    raw = {"params": {"n": 1}}
    apply_overrides(raw, ["params.n=5", "model.cov.matern_nu=2.5", "seed=3"])
    assert raw == {"params": {"n": 5}, "model": {"cov": {"matern_nu": 2.5}}, "seed": 3}


@pytest.mark.parametrize("override", ["novalue", "=3", "seed.inner=1"])
def test_apply_overrides_errors(override):
    with pytest.raises(ConfigError):
        apply_overrides({"seed": 1}, [override])


def test_read_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        read_config_file(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("experiment = ")
    with pytest.raises(ConfigError, match="Invalid TOML"):
        read_config_file(bad)


def test_load_builds_field_model(config_path):
    config = load_experiment_config("sample-grid", config_path)
    assert config.experiment == ExperimentName.SAMPLE_GRID
    assert config.seed == 7
    assert config.model.cov.kind == CovarianceKind.BROWNIAN_SHEET
    assert [s.kind for s in config.model.subs] == [SubordinatorKind.GAMMA, SubordinatorKind.POISSON]
    assert isinstance(config.typed_params, SampleGridParams)
    assert config.typed_params.n_per_axis == [4, 3]


def test_flags_win_over_overrides_and_file(config_path):
    config = load_experiment_config(
        "sample-grid", config_path, overrides=["seed=9", "params.n_per_axis=[2, 2]"], seed=11, threads=2, output_dir="out"
    )
    assert config.seed == 11
    assert config.threads == 2
    assert config.output_dir == "out"
    assert config.typed_params.n_per_axis == [2, 2]


def test_unknown_parameter_is_rejected(config_path):
    with pytest.raises(ValidationError):
        load_experiment_config("sample-grid", config_path, overrides=["params.bogus=1"])


def test_model_is_required_except_for_fit():
    with pytest.raises(ValidationError, match="model"):
        load_experiment_config("covariance")
    config = load_experiment_config("fit", overrides=["params.mode=density"])
    assert config.model is None
    assert isinstance(config.typed_params, FitParams)
    assert config.typed_params.mode.value == "density"


def test_invalid_field_model_is_rejected(config_path):
    with pytest.raises(ValidationError):
        load_experiment_config("sample-grid", config_path, overrides=["model.horizon=[1.0]"])


class _Color(Enum):
    RED = "red"


def test_format_cell():
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(np.float64(2.5)) == "2.5"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell(True) == "true"
    assert format_cell(None) == ""
    assert format_cell(_Color.RED) == "red"
    assert format_cell(float("inf")) == "inf"


def test_artifact_writer_manifest(tmp_path):
    out = tmp_path / "run"
    with ArtifactWriter(out, "sample-grid") as writer:
        csv_path = writer.write_csv("table.csv", ["a", "b"], [(1, 0.5), (2, None)])
        writer.write_manifest({"seed": 1}, seed=1, threads=2, summary={"ok": True})
    assert csv_path.read_text() == "a,b\n1,0.5\n2,\n"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "sample-grid"
    assert manifest["seed"] == 1
    assert manifest["threads"] == 2
    assert manifest["summary"] == {"ok": True}
    assert manifest["artifacts"] == {"table.csv": sha256_of_file(csv_path)}


def test_artifact_writer_cleans_up_on_error(tmp_path):
    out = tmp_path / "run"
    with pytest.raises(RuntimeError):
        with ArtifactWriter(out, "sample-grid") as writer:
            writer.write_csv("table.csv", ["a"], [(1,)])
            raise RuntimeError("boom")
    assert not out.exists()


def test_artifact_writer_keeps_existing_directory(tmp_path):
    (tmp_path / "keep.txt").write_text("x")
    with pytest.raises(RuntimeError):
        with ArtifactWriter(tmp_path, "sample-grid") as writer:
            writer.write_csv("table.csv", ["a"], [(1,)])
            raise RuntimeError("boom")
    assert tmp_path.exists()
    assert not (tmp_path / "table.csv").exists()
    assert (tmp_path / "keep.txt").exists()


@pytest.mark.parametrize("path", sorted(CONFIGS_DIR.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    raw = read_config_file(path)
    config = load_experiment_config(raw["experiment"], path)
    assert config.experiment.value == raw["experiment"]
