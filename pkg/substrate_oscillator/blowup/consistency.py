"""Checks tying the chart fields back to the global field."""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from substrate_oscillator.blowup.charts import (
    LEGAL_CHARTS,
    ChartId,
    ChartPoint,
    ScaledParams,
    Stage,
    chart,
    global_jacobian,
    point,
    to_global,
    weighted_coordinates,
)
from substrate_oscillator.blowup.fields import make_chart_field, sphere_field
from substrate_oscillator.exceptions import InvalidChartError, ParameterError
from substrate_oscillator.model.sigmoids import SigmoidSpec, arctan_sigmoid, power_tail_sigmoid
from substrate_oscillator.model.system import GammaVector, ModelParams

logger = logging.getLogger(__name__)

# coordinate slots whose zero set is flow-invariant
INVARIANT_SLOTS: dict[tuple[bool, str], tuple[int, ...]] = {
    (False, "xbar_neg1"): (0, 2),
    (False, "epsbar1"): (2,),
    (False, "deltabar1"): (2,),
    (False, "xbar1"): (0, 2),
    (True, "rbar1"): (0, 2),
    (True, "deltabar1"): (0, 1),
    (True, "ybar1"): (0, 1, 2),
    (True, "ybar_neg1"): (0, 1, 2),
}


@dataclass(frozen=True)
class ResidualRow:
    stage: str
    chart: str
    max_residual: float

    def as_row(self) -> tuple[str, str, float]:
        return self.stage, self.chart, self.max_residual


def global_fast_field(
    cp: ChartPoint,
    params: ModelParams | ScaledParams,
    gamma: Optional[GammaVector],
    spec: SigmoidSpec,
) -> np.ndarray:
    """The global field in fast time (eps or sigma^(k+1) times the slow field) at cp."""
    a, y, b = to_global(cp, gamma)
    if cp.chart.stage == Stage.CYLINDER1:
        x, eps = a, b
        alpha, beta, eta, mu = params.alpha, params.beta, params.eta, params.mu
    else:
        x, sigma = a, b
        k = cp.k
        eps = sigma ** (k + 1)
        alpha, beta = gamma.alpha, gamma.beta
        eta = 1.0 + sigma**k * params.eta1
        mu = sigma**k * params.mu1
    rate = alpha + beta * spec.value_fn((x - 1.0) / eps)
    return eps * np.array([rate * y - x, eta - (mu + rate) * y, 0.0])


def common_factor(cp: ChartPoint) -> float:
    """Factor the chart field was divided by, relative to the global fast field."""
    a, _, b = cp.coords
    name = cp.chart.name
    stage = cp.chart.stage
    if stage == Stage.CYLINDER1:
        return 1.0 if name == "epsbar1" else b
    if stage == Stage.CYLINDER2:
        return 1.0 if name == "deltabar1" else b ** (cp.k + 1)
    rho, _, _, D = weighted_coordinates(cp)
    return (rho * D) ** (cp.k + 1) * rho**cp.m


def _require_interior(cp: ChartPoint) -> None:
    for index in INVARIANT_SLOTS[(cp.chart.stage.is_sphere, cp.chart.name)]:
        if cp.coords[index] <= 0:
            raise InvalidChartError(
                f"pushforward check needs coordinate {index} of {cp.chart} > 0 (boundary state)"
            )


def pushforward_consistency(
    cp: ChartPoint,
    params: ModelParams | ScaledParams,
    gamma: Optional[GammaVector] = None,
    spec: Optional[SigmoidSpec] = None,
) -> float:
    """Max relative residual of D(chart map) . factor . chart field - global field.

    Raises:
        InvalidChartError: If cp lies on an invariant boundary set
    """
    _require_interior(cp)
    spec = spec or arctan_sigmoid()
    field = make_chart_field(cp.chart, params, gamma, spec)
    desingularized = field(0.0, np.array(cp.coords))
    pushed = global_jacobian(cp, gamma) @ (common_factor(cp) * desingularized)
    original = global_fast_field(cp, params, gamma, spec)
    scale = max(np.max(np.abs(original)), np.max(np.abs(pushed)), 1e-300)
    return float(np.max(np.abs(pushed - original)) / scale)


def _interior_box(stage: Stage, name: str) -> list[tuple[float, float]]:
    radial = (0.2, 0.8)
    positive = (0.2, 1.5)
    signed = (-1.5, 1.5)
    if stage.is_sphere:
        if name == "rbar1":
            return [radial, signed, positive]
        if name == "deltabar1":
            return [radial, positive, signed]
        return [radial, positive, positive]
    if name in ("epsbar1", "deltabar1"):
        return [(-5.0, 5.0), (0.2, 3.0), (0.05, 0.5)]
    return [(0.05, 0.9), (0.2, 3.0), (0.05, 2.0)]


def sample_interior(
    chart_id: ChartId, k: int, n: int, rng: np.random.Generator
) -> list[ChartPoint]:
    """n uniform samples strictly inside a chart, away from the invariant sets."""
    box = _interior_box(chart_id.stage, chart_id.name)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return [
        point(chart_id.stage, chart_id.name, lo + (hi - lo) * rng.random(3), k=k) for _ in range(n)
    ]


def sample_boundary(
    chart_id: ChartId, k: int, slot: int, n: int, rng: np.random.Generator
) -> list[ChartPoint]:
    """n samples on the invariant set {coords[slot] = 0}."""
    samples = []
    for cp in sample_interior(chart_id, k, n, rng):
        coords = list(cp.coords)
        coords[slot] = 0.0
        samples.append(point(chart_id.stage, chart_id.name, coords, k=k))
    return samples


def invariance_residual(
    chart_id: ChartId,
    params: ModelParams | ScaledParams,
    gamma: Optional[GammaVector],
    spec: Optional[SigmoidSpec],
    n: int = 1000,
    seed: int = 0,
) -> float:
    """Largest |derivative| normal to an invariant boundary set, over n samples per set."""
    rng = np.random.default_rng(seed)
    field = make_chart_field(chart_id, params, gamma, spec)
    worst = 0.0
    for slot in INVARIANT_SLOTS[(chart_id.stage.is_sphere, chart_id.name)]:
        for cp in sample_boundary(chart_id, gamma.k if gamma else 1, slot, n, rng):
            worst = max(worst, abs(float(field(0.0, np.array(cp.coords))[slot])))
    return worst


def coupling_residual(
    stage: Stage,
    name: str,
    gamma: GammaVector,
    pairs: Iterable[tuple[float, float]],
    states: Iterable[tuple[float, float]],
) -> float:
    """Spread of the rho = 0 field over (eta1, mu1) pairs sharing eta1 - eta1^ref(mu1)."""
    pairs = list(pairs)
    worst = 0.0
    for u in states:
        values = [
            sphere_field(stage, name, ScaledParams(eta1=eta1, mu1=mu1), gamma, (0.0, *u))
            for eta1, mu1 in pairs
        ]
        worst = max(worst, max(float(np.max(np.abs(v - values[0]))) for v in values))
    return worst


def verification_sigmoid(k: int) -> SigmoidSpec:
    """Arctan for k = 1, the power-tail family otherwise."""
    return arctan_sigmoid() if k == 1 else power_tail_sigmoid(k)


def verify_blowup(
    k: int = 1,
    n_samples: int = 200,
    seed: int = 0,
    alpha: float = 0.5,
    beta: float = 1.0,
) -> list[ResidualRow]:
    """Pushforward residuals on every chart of every stage at random interior points."""
    if k < 1:
        raise ParameterError(f"decay order k must be a positive integer, got {k}")
    if n_samples < 1:
        raise ParameterError(f"need at least one sample per chart, got {n_samples}")
    rng = np.random.default_rng(seed)
    spec = verification_sigmoid(k)
    p = ModelParams(alpha=alpha, beta=beta, eta=0.97, mu=0.02, eps=0.01)
    gamma = GammaVector(k=k, alpha=alpha, beta=beta, phiL0=spec.phiL0, phiR0=spec.phiR0)
    sp = ScaledParams(eta1=-0.3, mu1=0.2)
    rows = []
    for stage, names in LEGAL_CHARTS.items():
        params = p if stage == Stage.CYLINDER1 else sp
        chart_k = 1 if stage == Stage.CYLINDER1 else k
        for name in names:
            chart_id = chart(stage, name)
            worst = max(
                pushforward_consistency(cp, params, gamma, spec)
                for cp in sample_interior(chart_id, chart_k, n_samples, rng)
            )
            logger.debug(f"{chart_id}: max residual {worst:.3e}")
            rows.append(ResidualRow(stage.value, name, worst))
    return rows
