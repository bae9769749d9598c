"""Tests for the command-line interface."""

import csv
import json

import pytest
from click.testing import CliRunner

from substrate_oscillator.blowup.charts import LEGAL_CHARTS
from substrate_oscillator.cli.main import cli


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def gamma_file(tmp_path):
    path = tmp_path / "gamma.txt"
    path.write_text("alpha = 0.5\nbeta = 1\n", encoding="utf-8")
    return path


def invoke(runner, tmp_path, *args):
    return runner.invoke(cli, ["-o", str(tmp_path / "out"), *args], obj={})


class TestCli:
    def test_version(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "version")
        assert result.exit_code == 0
        assert "version" in result.output

    def test_missing_parameter_file(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "simulate", "--params", str(tmp_path / "absent.txt"))
        assert result.exit_code == 3
        record = json.loads((tmp_path / "out" / "error.json").read_text(encoding="utf-8"))
        assert record["error"] == "ConfigError"
        assert record["exit_code"] == 3

    def test_blowup_verify(self, runner, tmp_path):
        result = invoke(runner, tmp_path, "blowup-verify", "--samples", "5")
        assert result.exit_code == 0, result.output
        with (tmp_path / "out" / "blowup_residuals.csv").open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["stage", "chart", "max_residual"]
        assert len(rows) - 1 == sum(len(names) for names in LEGAL_CHARTS.values())

    @pytest.mark.parametrize("args", [["--k", "0"], ["--samples", "0"], ["--samples=-2"]])
    def test_blowup_verify_rejects_arguments(self, runner, tmp_path, args):
        result = invoke(runner, tmp_path, "blowup-verify", *args)
        assert result.exit_code == 3
        record = json.loads((tmp_path / "out" / "error.json").read_text(encoding="utf-8"))
        assert record["error"] == "ParameterError"
        assert record["exit_code"] == 3

    def test_bifurcate_needs_ten_points(self, runner, tmp_path):
        params = tmp_path / "p.txt"
        params.write_text("alpha = 0.5\nbeta = 2\neta = 1\neps = 0.0064\n", encoding="utf-8")
        result = invoke(
            runner, tmp_path, "bifurcate", "--params", str(params), "--eta-min", "0.9", "--eta-max", "1.05", "--n", "5"
        )
        assert result.exit_code == 3

    def test_classify_scaled_needs_het(self, runner, tmp_path):
        params = tmp_path / "scaled.txt"
        params.write_text("alpha = 0.5\nbeta = 1\neps = 0.001\nmu1 = 0.2\neta1 = 0.5\n", encoding="utf-8")
        result = invoke(runner, tmp_path, "classify", "--params", str(params))
        assert result.exit_code == 3

    def test_hopf_check(self, runner, tmp_path, gamma_file):
        result = invoke(runner, tmp_path, "hopf-check", "--gamma", str(gamma_file), "--side", "L", "--eta1", "-1")
        assert result.exit_code == 0, result.output
        record = json.loads((tmp_path / "out" / "hopf_L.json").read_text(encoding="utf-8"))
        assert record["hopf"]["difference"] < 1e-6
        assert len(record["equilibria"]) == 7
        assert record["nullcline_folds"]["count"] == 0

    def test_bad_settings(self, runner, tmp_path, monkeypatch):
        monkeypatch.setenv("SUBSTRATE_REL_TOL", "-1")
        result = invoke(runner, tmp_path, "version")
        assert result.exit_code == 3
