"""Blow-up charts: cylinder charts, parameter scaling, sphere charts and chart changes.

Global coordinates are (x, y, eps) for the first cylinder and (x, y, sigma),
eps = sigma^(k+1), for the weighted cylinder and both spheres.

Chart coordinate order:

=========  ==========  =====================  =====================
stage      chart       coords                 blow-down
=========  ==========  =====================  =====================
Cylinder1  xbar_neg1   (r1, y1, eps1)         x = 1 - r1, eps = r1 eps1
Cylinder1  epsbar1     (x2, y2, r2)           x = 1 + r2 x2, eps = r2
Cylinder1  xbar1       (r3, y3, eps3)         x = 1 + r3, eps = r3 eps3
Cylinder2  xbar_neg1   (r1, y1, delta1)       x = 1 - r1^(k+1), sigma = r1 delta1
Cylinder2  deltabar1   (x2, y2, r2)           x = 1 + r2^(k+1) x2, sigma = r2
Cylinder2  xbar1       (r3, y3, delta3)       x = 1 + r3^(k+1), sigma = r3 delta3
Sphere*    rbar1       (rho1, y1, delta1)     (r, y, delta) = (rho^k, yref + rho^m y1, rho delta1)
Sphere*    deltabar1   (rho2, r2, y2)         (rho^k r2, yref + rho^m y2, rho)
Sphere*    ybar1       (rho3, r3, delta3)     (rho^k r3, yref + rho^m, rho delta3)
Sphere*    ybar_neg1   (rho4, r4, delta4)     (rho^k r4, yref - rho^m, rho delta4)
=========  ==========  =====================  =====================

Here m = k(k+1). SphereL blows up p^L (yref = 1/alpha) inside the weighted
cylinder chart xbar_neg1, SphereR blows up p^R (yref = 1/(alpha+beta)) inside
xbar1.
"""

import logging
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from substrate_oscillator.exceptions import InvalidChartError, OutOfOverlapError, ParameterError
from substrate_oscillator.model.system import GammaVector

logger = logging.getLogger(__name__)


class Stage(str, Enum):
    CYLINDER1 = "Cylinder1"
    CYLINDER2 = "Cylinder2"
    SPHERE_L = "SphereL"
    SPHERE_R = "SphereR"

    @property
    def is_sphere(self) -> bool:
        return self in (Stage.SPHERE_L, Stage.SPHERE_R)


LEGAL_CHARTS: dict[Stage, tuple[str, ...]] = {
    Stage.CYLINDER1: ("xbar_neg1", "epsbar1", "xbar1"),
    Stage.CYLINDER2: ("xbar_neg1", "deltabar1", "xbar1"),
    Stage.SPHERE_L: ("rbar1", "deltabar1", "ybar1", "ybar_neg1"),
    Stage.SPHERE_R: ("rbar1", "deltabar1", "ybar1", "ybar_neg1"),
}

# coordinate slots that must be nonnegative
_NONNEGATIVE: dict[tuple[bool, str], tuple[int, ...]] = {
    (False, "xbar_neg1"): (0, 2),
    (False, "epsbar1"): (2,),
    (False, "deltabar1"): (2,),
    (False, "xbar1"): (0, 2),
    (True, "rbar1"): (0, 2),
    (True, "deltabar1"): (0, 1),
    (True, "ybar1"): (0, 1, 2),
    (True, "ybar_neg1"): (0, 1, 2),
}


class ChartId(BaseModel):
    """A (stage, chart name) pair."""

    model_config = ConfigDict(frozen=True)

    stage: Stage
    name: str

    @model_validator(mode="after")
    def check_legal(self) -> "ChartId":
        if self.name not in LEGAL_CHARTS[self.stage]:
            raise InvalidChartError(f"no chart '{self.name}' in stage {self.stage.value}")
        return self

    def __str__(self) -> str:
        return f"{self.stage.value}/{self.name}"


class ChartPoint(BaseModel):
    """A point in a named chart together with the decay order k."""

    model_config = ConfigDict(frozen=True)

    chart: ChartId
    coords: tuple[float, float, float]
    k: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_domain(self) -> "ChartPoint":
        for index in _NONNEGATIVE[(self.chart.stage.is_sphere, self.chart.name)]:
            if self.coords[index] < 0:
                raise InvalidChartError(
                    f"coordinate {index} of {self.chart} must be >= 0, got {self.coords[index]:g}"
                )
        return self

    @property
    def m(self) -> int:
        return self.k * (self.k + 1)

    def to_record(self) -> dict:
        return {
            "stage": self.chart.stage.value,
            "name": self.chart.name,
            "coords": list(self.coords),
            "k": self.k,
        }


def chart(stage: Stage | str, name: str) -> ChartId:
    return ChartId(stage=Stage(stage), name=name)


def point(stage: Stage | str, name: str, coords, k: int = 1) -> ChartPoint:
    return ChartPoint(chart=chart(stage, name), coords=tuple(float(c) for c in coords), k=k)


def _require_stage(cp: ChartPoint, *stages: Stage) -> None:
    if cp.chart.stage not in stages:
        wanted = ", ".join(s.value for s in stages)
        raise InvalidChartError(f"expected a {wanted} chart point, got {cp.chart}")


# Parameter scaling


class ScaledParams(BaseModel):
    """sigma = eps^(1/(k+1)), mu = sigma^k mu1, eta = 1 + sigma^k eta1."""

    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=0.0, ge=0)
    eta1: float
    mu1: float = Field(default=0.0, ge=0)

    def offset(self, gamma: GammaVector, side: str) -> float:
        """eta1 - eta1^{L/R}(mu1); the only combination the sphere problems see."""
        return self.eta1 - (gamma.etaL(self.mu1) if side == "L" else gamma.etaR(self.mu1))


def scale_params(eps: float, mu1: float, eta1: float, k: int) -> tuple[float, float, float]:
    """(eps, mu, eta) from the scaled parameters."""
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps:g}")
    sigma_k = eps ** (k / (k + 1))
    return eps, sigma_k * mu1, 1.0 + sigma_k * eta1


def unscale_params(eps: float, mu: float, eta: float, k: int) -> ScaledParams:
    """Inverse of scale_params; undefined at eps = 0."""
    if eps <= 0:
        raise ParameterError("the parameter scaling cannot be inverted at eps = 0")
    sigma = eps ** (1.0 / (k + 1))
    sigma_k = sigma**k
    return ScaledParams(sigma=sigma, eta1=(eta - 1.0) / sigma_k, mu1=mu / sigma_k)


# Cylinder charts


def cylinder1_to_global(cp: ChartPoint) -> tuple[float, float, float]:
    """(x, y, eps) of a first-cylinder chart point."""
    _require_stage(cp, Stage.CYLINDER1)
    a, y, b = cp.coords
    name = cp.chart.name
    if name == "xbar_neg1":
        return 1.0 - a, y, a * b
    if name == "epsbar1":
        return 1.0 + b * a, y, b
    return 1.0 + a, y, a * b


def global_to_cylinder1(x: float, y: float, eps: float, name: str) -> ChartPoint:
    if name == "epsbar1":
        if eps <= 0:
            raise OutOfOverlapError("chart epsbar1 needs eps > 0")
        coords = ((x - 1.0) / eps, y, eps)
    elif name == "xbar_neg1":
        if x >= 1:
            raise OutOfOverlapError("chart xbar_neg1 needs x < 1")
        coords = (1.0 - x, y, eps / (1.0 - x))
    elif name == "xbar1":
        if x <= 1:
            raise OutOfOverlapError("chart xbar1 needs x > 1")
        coords = (x - 1.0, y, eps / (x - 1.0))
    else:
        raise InvalidChartError(f"no chart '{name}' in stage Cylinder1")
    return point(Stage.CYLINDER1, name, coords)


def cylinder2_to_global(cp: ChartPoint) -> tuple[float, float, float]:
    """(x, y, sigma) of a weighted-cylinder chart point."""
    _require_stage(cp, Stage.CYLINDER2)
    a, y, b = cp.coords
    kp1 = cp.k + 1
    name = cp.chart.name
    if name == "xbar_neg1":
        return 1.0 - a**kp1, y, a * b
    if name == "deltabar1":
        return 1.0 + b**kp1 * a, y, b
    return 1.0 + a**kp1, y, a * b


def global_to_cylinder2(x: float, y: float, sigma: float, name: str, k: int) -> ChartPoint:
    kp1 = k + 1
    if name == "deltabar1":
        if sigma <= 0:
            raise OutOfOverlapError("chart deltabar1 needs sigma > 0")
        coords = ((x - 1.0) / sigma**kp1, y, sigma)
    elif name == "xbar_neg1":
        if x >= 1:
            raise OutOfOverlapError("chart xbar_neg1 needs x < 1")
        r = (1.0 - x) ** (1.0 / kp1)
        coords = (r, y, sigma / r)
    elif name == "xbar1":
        if x <= 1:
            raise OutOfOverlapError("chart xbar1 needs x > 1")
        r = (x - 1.0) ** (1.0 / kp1)
        coords = (r, y, sigma / r)
    else:
        raise InvalidChartError(f"no chart '{name}' in stage Cylinder2")
    return point(Stage.CYLINDER2, name, coords, k=k)


def cylinder_chart_jacobian(cp: ChartPoint) -> np.ndarray:
    """d(global)/d(chart coords) for a cylinder chart point."""
    a, _, b = cp.coords
    name = cp.chart.name
    weighted = cp.chart.stage == Stage.CYLINDER2
    kp1 = cp.k + 1 if weighted else 1
    if name == "epsbar1" or name == "deltabar1":
        return np.array(
            [
                [b**kp1, 0.0, kp1 * b ** (kp1 - 1) * a],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
    sign = -1.0 if name == "xbar_neg1" else 1.0
    return np.array(
        [
            [sign * kp1 * a ** (kp1 - 1), 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [b, 0.0, a],
        ]
    )


# Sphere charts


def sphere_reference_y(stage: Stage, gamma: GammaVector) -> float:
    return gamma.yL if stage == Stage.SPHERE_L else gamma.yR


def sphere_cylinder_chart(stage: Stage) -> str:
    """The weighted-cylinder chart each sphere lives in."""
    return "xbar_neg1" if stage == Stage.SPHERE_L else "xbar1"


def weighted_coordinates(cp: ChartPoint) -> tuple[float, float, float, float]:
    """(rho, R, Y, D) with the chart's normalized coordinate filled in."""
    rho, a, b = cp.coords
    name = cp.chart.name
    if name == "rbar1":
        return rho, 1.0, a, b
    if name == "deltabar1":
        return rho, a, b, 1.0
    if name == "ybar1":
        return rho, a, 1.0, b
    return rho, a, -1.0, b


def from_weighted(
    stage: Stage, name: str, rho: float, R: float, Y: float, D: float, k: int
) -> ChartPoint:
    """Normalize (rho, R, Y, D) ~ (rho/s, s^k R, s^m Y, s D) onto the target chart."""
    m = k * (k + 1)
    if name == "rbar1":
        if R <= 0:
            raise OutOfOverlapError(f"chart rbar1 needs r > 0, got {R:g}")
        s = R ** (-1.0 / k)
    elif name == "deltabar1":
        if D <= 0:
            raise OutOfOverlapError(f"chart deltabar1 needs delta > 0, got {D:g}")
        s = 1.0 / D
    elif name == "ybar1":
        if Y <= 0:
            raise OutOfOverlapError(f"chart ybar1 needs y > 0, got {Y:g}")
        s = Y ** (-1.0 / m)
    elif name == "ybar_neg1":
        if Y >= 0:
            raise OutOfOverlapError(f"chart ybar_neg1 needs y < 0, got {Y:g}")
        s = (-Y) ** (-1.0 / m)
    else:
        raise InvalidChartError(f"no chart '{name}' in stage {stage.value}")
    rho_n, R_n, Y_n, D_n = rho / s, s**k * R, s**m * Y, s * D
    if name == "rbar1":
        coords = (rho_n, Y_n, D_n)
    elif name == "deltabar1":
        coords = (rho_n, R_n, Y_n)
    else:
        coords = (rho_n, R_n, D_n)
    return point(stage, name, coords, k=k)


def chart_change(cp: ChartPoint, target: ChartId) -> ChartPoint:
    """Move a point between charts of the same stage.

    Raises:
        InvalidChartError: If the stages differ
        OutOfOverlapError: If the point is outside the target chart
    """
    stage = cp.chart.stage
    if target.stage != stage:
        raise InvalidChartError(f"cannot change from {cp.chart} to {target}")
    if target.name == cp.chart.name:
        return cp
    if stage.is_sphere:
        rho, R, Y, D = weighted_coordinates(cp)
        return from_weighted(stage, target.name, rho, R, Y, D, cp.k)
    if stage == Stage.CYLINDER1:
        x, y, eps = cylinder1_to_global(cp)
        return global_to_cylinder1(x, y, eps, target.name)
    x, y, sigma = cylinder2_to_global(cp)
    return global_to_cylinder2(x, y, sigma, target.name, cp.k)


def sphere_to_cylinder(cp: ChartPoint, gamma: GammaVector) -> ChartPoint:
    """Blow a sphere chart point down into its weighted-cylinder chart."""
    _require_stage(cp, Stage.SPHERE_L, Stage.SPHERE_R)
    k, m = cp.k, cp.m
    rho, R, Y, D = weighted_coordinates(cp)
    yref = sphere_reference_y(cp.chart.stage, gamma)
    coords = (rho**k * R, yref + rho**m * Y, rho * D)
    return point(Stage.CYLINDER2, sphere_cylinder_chart(cp.chart.stage), coords, k=k)


def cylinder_to_sphere(cp: ChartPoint, stage: Stage, name: str, gamma: GammaVector) -> ChartPoint:
    """Inverse of sphere_to_cylinder away from rho = 0."""
    _require_stage(cp, Stage.CYLINDER2)
    if cp.chart.name != sphere_cylinder_chart(stage):
        raise InvalidChartError(f"{stage.value} lives in chart {sphere_cylinder_chart(stage)}")
    r, y, delta = cp.coords
    u = y - sphere_reference_y(stage, gamma)
    # weighted point with rho = 1
    return from_weighted(stage, name, 1.0, r, u, delta, cp.k)


def sphere_to_global(cp: ChartPoint, gamma: GammaVector) -> tuple[float, float, float]:
    return cylinder2_to_global(sphere_to_cylinder(cp, gamma))


def sphere_chart_jacobian(cp: ChartPoint) -> np.ndarray:
    """d(r, y, delta)/d(chart coords) of the sphere blow-down."""
    k, m = cp.k, cp.m
    rho, R, Y, D = weighted_coordinates(cp)
    d_rho = [k * rho ** (k - 1) * R, m * rho ** (m - 1) * Y, D]
    name = cp.chart.name
    if name == "rbar1":
        columns = [d_rho, [0.0, rho**m, 0.0], [0.0, 0.0, rho]]
    elif name == "deltabar1":
        columns = [d_rho, [rho**k, 0.0, 0.0], [0.0, rho**m, 0.0]]
    else:
        columns = [d_rho, [rho**k, 0.0, 0.0], [0.0, 0.0, rho]]
    return np.array(columns).T


def global_jacobian(cp: ChartPoint, gamma: GammaVector | None = None) -> np.ndarray:
    """d(global)/d(chart coords) for any chart, composing through the cylinder for spheres."""
    if cp.chart.stage.is_sphere:
        if gamma is None:
            raise InvalidChartError("sphere charts need gamma for the blow-down")
        cylinder = sphere_to_cylinder(cp, gamma)
        return cylinder_chart_jacobian(cylinder) @ sphere_chart_jacobian(cp)
    return cylinder_chart_jacobian(cp)


def to_global(cp: ChartPoint, gamma: GammaVector | None = None) -> tuple[float, float, float]:
    stage = cp.chart.stage
    if stage == Stage.CYLINDER1:
        return cylinder1_to_global(cp)
    if stage == Stage.CYLINDER2:
        return cylinder2_to_global(cp)
    if gamma is None:
        raise InvalidChartError("sphere charts need gamma for the blow-down")
    return sphere_to_global(cp, gamma)


def section_abscissa(gamma: GammaVector, fraction: float) -> float:
    """r4 of the shooting section: a fraction of q_w's abscissa (alpha/(1-alpha))^(1/(k+1))."""
    return fraction * (gamma.alpha / (1.0 - gamma.alpha)) ** (1.0 / (gamma.k + 1))


def is_finite_point(cp: ChartPoint) -> bool:
    return all(math.isfinite(c) for c in cp.coords)
