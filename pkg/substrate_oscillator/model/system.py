"""The substrate-depletion oscillator and its parameter types."""

import logging
import math
from typing import Callable, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from substrate_oscillator.exceptions import ParameterError, UnsupportedSpecError
from substrate_oscillator.model.sigmoids import SigmoidSpec

logger = logging.getLogger(__name__)

PlanarField = Callable[[float, np.ndarray], np.ndarray]


class PlanarState(NamedTuple):
    """Product x and substrate y."""

    x: float
    y: float


class ModelParams(BaseModel):
    """Parameters (alpha, beta, eta, mu, eps) of the full system.

    Construction rejects alpha outside (0, 1) and alpha + beta <= 1. A negative
    mu is accepted here; operations that need mu >= 0 check it themselves.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, lt=1)
    beta: float = Field(ge=0)
    eta: float
    mu: float = 0.0
    eps: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def check_relaxation_regime(self) -> "ModelParams":
        if self.alpha + self.beta <= 1 and self.beta > 0:
            raise ValueError(f"alpha + beta must exceed 1, got {self.alpha + self.beta:g}")
        for name in ("alpha", "beta", "eta", "mu", "eps"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self

    def with_(self, **changes: float) -> "ModelParams":
        """Copy with some fields replaced, re-running validation."""
        return ModelParams(**{**self.model_dump(), **changes})

    def require_smooth(self) -> None:
        if self.eps <= 0:
            raise ParameterError("the full system needs eps > 0 (eps = 0 is the PWL limit)")


class GammaVector(BaseModel):
    """The bundle (k, alpha, beta, phiL(0), phiR(0)) the sphere problems depend on."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    alpha: float = Field(gt=0, lt=1)
    beta: float = Field(gt=0)
    phiL0: float = Field(gt=0)
    phiR0: float = Field(gt=0)

    @model_validator(mode="after")
    def check_sum(self) -> "GammaVector":
        if self.alpha + self.beta <= 1:
            raise ValueError(f"alpha + beta must exceed 1, got {self.alpha + self.beta:g}")
        return self

    @classmethod
    def from_model(cls, p: ModelParams, spec: SigmoidSpec) -> "GammaVector":
        if spec.k is None or spec.phiL0 is None or spec.phiR0 is None:
            raise UnsupportedSpecError(f"{spec.label} has no algebraic tail data")
        return cls(k=spec.k, alpha=p.alpha, beta=p.beta, phiL0=spec.phiL0, phiR0=spec.phiR0)

    @property
    def m(self) -> int:
        """Weight k(k+1) of y on the spheres."""
        return self.k * (self.k + 1)

    @property
    def yL(self) -> float:
        return 1.0 / self.alpha

    @property
    def yR(self) -> float:
        return 1.0 / (self.alpha + self.beta)

    def etaL(self, mu1: float) -> float:
        """Scaled left boundary value mu1/alpha."""
        return mu1 / self.alpha

    def etaR(self, mu1: float) -> float:
        """Scaled right boundary value mu1/(alpha + beta)."""
        return mu1 / (self.alpha + self.beta)


def full_vector_field(p: ModelParams, spec: SigmoidSpec, s: PlanarState) -> tuple[float, float]:
    """Right-hand side ((alpha + beta phi) y - x, eta - (mu + alpha + beta phi) y)."""
    p.require_smooth()
    x, y = s
    phi = spec.value_fn((x - 1.0) / p.eps)
    rate = p.alpha + p.beta * phi
    return rate * y - x, p.eta - (p.mu + rate) * y


def full_jacobian(p: ModelParams, spec: SigmoidSpec, s: PlanarState) -> np.ndarray:
    p.require_smooth()
    x, y = s
    z = (x - 1.0) / p.eps
    phi = spec.value_fn(z)
    dphi = spec.derivative_fn(z) / p.eps
    rate = p.alpha + p.beta * phi
    return np.array(
        [
            [p.beta * dphi * y - 1.0, rate],
            [-p.beta * dphi * y, -(p.mu + rate)],
        ]
    )


def make_full_field(p: ModelParams, spec: SigmoidSpec) -> PlanarField:
    """The full system as an ``f(t, u)`` callable for the integrators."""
    p.require_smooth()
    alpha, beta, eta, mu, eps = p.alpha, p.beta, p.eta, p.mu, p.eps
    value = spec.value_fn

    def field(t: float, u: np.ndarray) -> np.ndarray:
        phi = value((u[0] - 1.0) / eps)
        rate = alpha + beta * phi
        return np.array([rate * u[1] - u[0], eta - (mu + rate) * u[1]])

    return field


def make_full_jacobian(p: ModelParams, spec: SigmoidSpec) -> Callable[[float, np.ndarray], np.ndarray]:
    def jac(t: float, u: np.ndarray) -> np.ndarray:
        return full_jacobian(p, spec, PlanarState(float(u[0]), float(u[1])))

    return jac


def critical_manifold(p: ModelParams, spec: SigmoidSpec, x2: float) -> float:
    """y on the critical manifold of the layer problem: 1/(alpha + beta phi(x2))."""
    return 1.0 / (p.alpha + p.beta * spec.value_fn(x2))


def reduced_flow(p: ModelParams, y: float) -> float:
    """Slow flow eta - 1 - mu y on the critical manifold."""
    return p.eta - 1.0 - p.mu * y


def equilibrium_eta(p: ModelParams, spec: SigmoidSpec, x: float) -> tuple[float, float]:
    """(eta, y) for which (x, y) is an equilibrium; the branch is a graph over x."""
    p.require_smooth()
    rate = p.alpha + p.beta * spec.value_fn((x - 1.0) / p.eps)
    y = x / rate
    return (p.mu + rate) * y, y
