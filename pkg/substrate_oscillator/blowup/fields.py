"""Desingularized vector fields in every blow-up chart.

All sphere charts share one implementation: with (rho, R, Y, D) the weighted
coordinates of a point and m = k(k+1),

    A = R^(k+1) - F  (left sphere),   A = R^(k+1) + F  (right sphere)
    G = R^(k+1) (F + R^k D^k (eta1 - eta1^ref(mu1) - mu1 rho^m Y))
    R' = -R A/(k+1) - k w R,  Y' = G - m w Y,  D' = D A/(k+1) - w D,  rho' = rho w

where w is fixed by the chart's normalized coordinate.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from substrate_oscillator.blowup.charts import (
    LEGAL_CHARTS,
    ChartId,
    ScaledParams,
    Stage,
)
from substrate_oscillator.exceptions import InvalidChartError
from substrate_oscillator.model.sigmoids import (
    SigmoidSpec,
    inverse_sigmoid,
    left_weight,
    right_weight,
)
from substrate_oscillator.model.system import GammaVector, ModelParams

logger = logging.getLogger(__name__)

Tail = Callable[[float], float]


@dataclass(frozen=True)
class ChartField:
    """A chart together with its right-hand side ``coords -> derivative``."""

    chart: ChartId
    rhs: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        return self.rhs(np.asarray(u, dtype=float))


# First cylinder


def cylinder1_field(name: str, p: ModelParams, spec: SigmoidSpec, state) -> np.ndarray:
    """Fast-time field on the first cylinder, divided by eps1 or eps3 in the side charts."""
    a, y, b = (float(v) for v in state)
    alpha, beta, eta, mu = p.alpha, p.beta, p.eta, p.mu
    if name == "epsbar1":
        phi = spec.value_fn(a)
        rate = alpha + beta * phi
        return np.array([rate * y - 1.0 - b * a, b * (eta - (mu + rate) * y), 0.0])
    if name == "xbar_neg1":
        rate = alpha + beta * left_weight(spec, b)
        c = rate * y - 1.0 + a
        return np.array([-a * c, a * (eta - (mu + rate) * y), b * c])
    if name == "xbar1":
        rate = alpha + beta * (1.0 - right_weight(spec, b))
        c = rate * y - 1.0 - a
        return np.array([a * c, a * (eta - (mu + rate) * y), -b * c])
    raise InvalidChartError(f"no chart '{name}' in stage Cylinder1")


# Weighted cylinder


def cylinder2_field(
    name: str, sp: ScaledParams, gamma: GammaVector, state, spec: SigmoidSpec
) -> np.ndarray:
    """Fields X1 (xbar_neg1), X2 (deltabar1) and X3 (xbar1) of the weighted cylinder."""
    a, y, b = (float(v) for v in state)
    k = gamma.k
    kp1 = k + 1
    alpha, beta = gamma.alpha, gamma.beta
    if name == "deltabar1":
        F2 = 1.0 - (alpha + beta * spec.value_fn(a)) * y
        rk1 = b**kp1
        return np.array([-rk1 * a - F2, rk1 * (F2 + b**k * (sp.eta1 - sp.mu1 * y)), 0.0])
    coupling = a**k * b**k * (sp.eta1 - sp.mu1 * y)
    rk1 = a**kp1
    if name == "xbar_neg1":
        F1 = 1.0 - (alpha + beta * left_weight(spec, b**kp1, k)) * y
        growth = rk1 - F1
        return np.array([-a * growth / kp1, rk1 * (F1 + coupling), b * growth / kp1])
    if name == "xbar1":
        F3 = 1.0 - (alpha + beta * (1.0 - right_weight(spec, b**kp1, k))) * y
        growth = rk1 + F3
        return np.array([-a * growth / kp1, rk1 * (F3 + coupling), b * growth / kp1])
    raise InvalidChartError(f"no chart '{name}' in stage Cylinder2")


# Spheres


def _tail(stage: Stage, gamma: GammaVector, spec: Optional[SigmoidSpec]) -> Tail:
    """phiL or phiR; frozen at its w = 0 value when no sigmoid is given."""
    if stage == Stage.SPHERE_L:
        if spec is not None and spec.has_tails:
            return spec.tail_left
        return lambda w: gamma.phiL0
    if spec is not None and spec.has_tails:
        return spec.tail_right
    return lambda w: gamma.phiR0


def unpack_weighted(name: str, state) -> tuple[float, float, float, float]:
    """(rho, R, Y, D) from raw sphere-chart coordinates, without domain checks."""
    rho, a, b = (float(v) for v in state)
    if name == "rbar1":
        return rho, 1.0, a, b
    if name == "deltabar1":
        return rho, a, b, 1.0
    if name == "ybar1":
        return rho, a, 1.0, b
    return rho, a, -1.0, b


def sphere_terms(
    stage: Stage,
    rho: float,
    R: float,
    Y: float,
    D: float,
    gamma: GammaVector,
    sp: ScaledParams,
    tail: Tail,
) -> tuple[float, float]:
    """(A, G) of a sphere at weighted coordinates (rho, R, Y, D)."""
    k, m = gamma.k, gamma.m
    Dm = D**m
    rhom = rho**m
    t = tail((rho * D) ** (k + 1))
    alpha, beta = gamma.alpha, gamma.beta
    if stage == Stage.SPHERE_L:
        F = -(beta / alpha) * Dm * t - (alpha + beta * rhom * Dm * t) * Y
        A = R ** (k + 1) - F
        coupling = sp.eta1 - gamma.etaL(sp.mu1) - sp.mu1 * rhom * Y
    else:
        s = alpha + beta
        F = -s * Y + (beta / s) * Dm * t + beta * rhom * Dm * t * Y
        A = R ** (k + 1) + F
        coupling = sp.eta1 - gamma.etaR(sp.mu1) - sp.mu1 * rhom * Y
    G = R ** (k + 1) * (F + R**k * D**k * coupling)
    return A, G


def sphere_field(
    stage: Stage,
    name: str,
    sp: ScaledParams,
    gamma: GammaVector,
    state,
    spec: Optional[SigmoidSpec] = None,
) -> np.ndarray:
    """Field on a sphere chart in the coordinate order of ``blowup.charts``."""
    if not stage.is_sphere:
        raise InvalidChartError(f"{stage.value} is not a sphere stage")
    if name not in LEGAL_CHARTS[stage]:
        raise InvalidChartError(f"no chart '{name}' in stage {stage.value}")
    rho, R, Y, D = unpack_weighted(name, state)
    A, G = sphere_terms(stage, rho, R, Y, D, gamma, sp, _tail(stage, gamma, spec))
    k, m = gamma.k, gamma.m
    if name == "rbar1":
        w = -A / m
    elif name == "deltabar1":
        w = A / (k + 1)
    elif name == "ybar1":
        w = G / m
    else:
        w = -G / m
    dR = -R * A / (k + 1) - k * w * R
    dY = G - m * w * Y
    dD = D * A / (k + 1) - w * D
    d_rho = rho * w
    if name == "rbar1":
        return np.array([d_rho, dY, dD])
    if name == "deltabar1":
        return np.array([d_rho, dR, dY])
    return np.array([d_rho, dR, dD])


def sphere_planar_field(
    stage: Stage, name: str, gamma: GammaVector, offset: float
) -> Callable[[float, np.ndarray], np.ndarray]:
    """The rho = 0 system of a sphere chart as ``f(t, u)`` on the two remaining coordinates.

    On rho = 0 the dynamics see (eta1, mu1) only through ``offset`` = eta1 - eta1^ref(mu1),
    so the field is built with mu1 = 0 and eta1 = offset.
    """
    if not stage.is_sphere or name not in LEGAL_CHARTS[stage]:
        raise InvalidChartError(f"no sphere chart {stage.value}/{name}")
    sp = ScaledParams(eta1=offset, mu1=0.0)

    def field(t: float, u: np.ndarray) -> np.ndarray:
        return sphere_field(stage, name, sp, gamma, (0.0, u[0], u[1]))[1:]

    return field


def make_chart_field(
    chart_id: ChartId,
    params: ModelParams | ScaledParams,
    gamma: Optional[GammaVector],
    spec: Optional[SigmoidSpec],
) -> ChartField:
    """Bind a chart's field to its parameters."""
    stage = chart_id.stage
    name = chart_id.name
    if stage == Stage.CYLINDER1:
        if not isinstance(params, ModelParams) or spec is None:
            raise InvalidChartError("Cylinder1 fields need ModelParams and a sigmoid")
        return ChartField(chart_id, lambda u: cylinder1_field(name, params, spec, u))
    if not isinstance(params, ScaledParams) or gamma is None:
        raise InvalidChartError(f"{stage.value} fields need ScaledParams and gamma")
    if stage == Stage.CYLINDER2:
        if spec is None:
            raise InvalidChartError("Cylinder2 fields need a sigmoid with tails")
        return ChartField(chart_id, lambda u: cylinder2_field(name, params, gamma, u, spec))
    return ChartField(chart_id, lambda u: sphere_field(stage, name, params, gamma, u, spec))


def slow_flow_saddle(
    sp: ScaledParams, gamma: GammaVector, spec: SigmoidSpec
) -> Optional[tuple[float, float]]:
    """(x2, y2) of the saddle of the deltabar1 slow flow at r2 = 0.

    Exists for mu1 > 0 and eta1^R(mu1) < eta1 < eta1^L(mu1): y2 = eta1/mu1 and
    phi(x2) = (mu1/eta1 - alpha)/beta.
    """
    if sp.mu1 <= 0 or not gamma.etaR(sp.mu1) < sp.eta1 < gamma.etaL(sp.mu1):
        return None
    y2 = sp.eta1 / sp.mu1
    level = (1.0 / y2 - gamma.alpha) / gamma.beta
    return inverse_sigmoid(spec, level), y2


def slow_reduced_flow(sp: ScaledParams, y2: float) -> float:
    """y2' = eta1 - mu1 y2 on the deltabar1 slow manifold (time rescaled by r2^(2k+1))."""
    return sp.eta1 - sp.mu1 * y2
