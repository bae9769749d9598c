"""Tests for parameter files and environment settings."""

import math

import pytest
from pydantic import ValidationError

from substrate_oscillator.config.params import load_gamma, load_model, load_scaled, read_parameter_file
from substrate_oscillator.config.settings import Settings, get_settings, reset_settings
from substrate_oscillator.exceptions import ConfigError
from substrate_oscillator.numerics.integrate import IntegratorConfig


def write(tmp_path, text: str):
    path = tmp_path / "params.txt"
    path.write_text(text, encoding="utf-8")
    return path


class TestParameterFile:
    def test_plain_parameters(self, tmp_path):
        path = write(tmp_path, "# reference\nalpha = 0.5\nbeta = 2\neta = 1\neps = 0.0064\n")
        model, spec = load_model(path)
        assert (model.alpha, model.beta, model.eta, model.mu, model.eps) == (0.5, 2.0, 1.0, 0.0, 0.0064)
        assert spec.label == "arctan"

    def test_scaled_parameters(self, tmp_path):
        path = write(tmp_path, "alpha = 0.5\nbeta = 2\neps = 0.0064\nmu1 = 0.5\neta1 = 0.3\n")
        model, _ = load_model(path)
        assert model.mu == pytest.approx(0.04)
        assert model.eta == pytest.approx(1.024)
        assert load_scaled(path) == (0.0064, 0.5, 0.3)

    def test_sigmoid_keys(self, tmp_path):
        path = write(tmp_path, "alpha = 0.5\nbeta = 2\neta = 1\nsigmoid.family = hill\nsigmoid.n = 4\n")
        _, spec = load_model(path)
        assert spec.k is None

    def test_gamma_defaults_to_sigmoid_tails(self, tmp_path):
        gamma = load_gamma(write(tmp_path, "alpha = 0.5\nbeta = 1\n"))
        assert gamma.k == 1
        assert gamma.phiL0 == pytest.approx(1.0 / math.pi)

    def test_gamma_explicit_tails(self, tmp_path):
        path = write(
            tmp_path, "alpha = 0.5\nbeta = 1\nsigmoid.k = 2\nsigmoid.phiL0 = 0.3\nsigmoid.phiR0 = 0.7\n"
        )
        gamma = load_gamma(path)
        assert (gamma.k, gamma.phiL0, gamma.phiR0) == (2, 0.3, 0.7)

    @pytest.mark.parametrize(
        "text",
        [
            "alpha = 0.5\nbeta = 2\neta = 1\ngamma = 3\n",
            "alpha = 0.5\nbeta = 2\neta = abc\n",
            "alpha = 0.5\nbeta = 2\neta =\n",
            "alpha = 0.5\nbeta = 2\neta = 1\neta1 = 0.2\neps = 0.01\n",
            "alpha = 0.5\nbeta = 2\n",
            "alpha = 0.5\nbeta = 2\nmu1 = 0.2\n",
            "alpha = 1.5\nbeta = 2\neta = 1\n",
            "alpha = 0.5\nbeta = 2\neta = 1\nsigmoid.family = logistic\n",
            "alpha = 0.5\nbeta = 2\neps = 0.01\neta1 = 0.1\nsigmoid.family = hill\n",
            "alpha = 0.5\nbeta = 2\neta = 1\nsigmoid_family = hill\n",
            "alpha = 0.5\nbeta = 2\neta = 1\nsigmoid_k = 2\n",
        ],
    )
    def test_rejected(self, tmp_path, text):
        with pytest.raises(ConfigError):
            load_model(write(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_parameter_file(tmp_path / "absent.txt")

    def test_scaled_file_expected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_scaled(write(tmp_path, "alpha = 0.5\nbeta = 2\neta = 1\neps = 0.01\n"))


class TestSettings:
    def test_defaults(self):
        settings = get_settings()
        assert settings.rel_tol == 1e-9
        assert settings.max_step == math.inf
        assert settings.output_dir == "output"

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("SUBSTRATE_MAX_STEP", "inf")
        monkeypatch.setenv("SUBSTRATE_SHOOTING_TOL", "1e-6")
        reset_settings()
        settings = get_settings()
        assert settings.max_step == math.inf
        assert settings.shooting_tol == 1e-6

    def test_dotenv_file(self, tmp_path):
        (tmp_path / ".env").write_text("SUBSTRATE_REL_TOL=1e-7\n", encoding="utf-8")
        reset_settings()
        assert get_settings().rel_tol == 1e-7

    def test_invalid_value(self, monkeypatch):
        monkeypatch.setenv("SUBSTRATE_REL_TOL", "-1")
        with pytest.raises(ValidationError):
            Settings()

    def test_integrator_config_from_settings(self):
        cfg = IntegratorConfig.from_settings(Settings(rel_tol=1e-6, cycle_max_iter=5))
        assert cfg.rel_tol == 1e-6
        assert cfg.cycle_max_iter == 5
