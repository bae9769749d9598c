"""Shared fixtures and the --runslow switch."""

import math
import os

import pytest

from substrate_oscillator.config.settings import reset_settings
from substrate_oscillator.model.sigmoids import arctan_sigmoid
from substrate_oscillator.model.system import GammaVector, ModelParams
from substrate_oscillator.numerics.integrate import IntegratorConfig


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run long integrations and shooting"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch, tmp_path):
    """Every test reads settings from a clean environment and an empty working directory."""
    for name in list(os.environ):
        if name.startswith("SUBSTRATE_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def reference_params() -> ModelParams:
    """The relaxation regime alpha = 0.5, beta = 2, eta = 1, mu = 0, eps = 0.0064."""
    return ModelParams(alpha=0.5, beta=2.0, eta=1.0, mu=0.0, eps=0.0064)


@pytest.fixture
def arctan():
    return arctan_sigmoid()


@pytest.fixture
def gamma() -> GammaVector:
    return GammaVector(k=1, alpha=0.5, beta=1.0, phiL0=1.0 / math.pi, phiR0=1.0 / math.pi)


@pytest.fixture
def fast_cfg() -> IntegratorConfig:
    return IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, return_t_max=200.0)
