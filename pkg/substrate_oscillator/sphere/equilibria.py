"""Equilibria of the rho = 0 dynamics on the two blow-up spheres."""

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.optimize import root

from substrate_oscillator.blowup.charts import ChartId, ScaledParams, Stage, chart
from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.exceptions import (
    ClassificationMismatchError,
    ConvergenceError,
    ParameterError,
)
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.numerics.equilibria import classify_eigenvalues, jacobian_fd

logger = logging.getLogger(__name__)

Side = Literal["L", "R"]

NEWTON_TOL = 1e-10
# eigenvalues below this count as the centre direction of q_r
CENTER_ATOL = 1e-7

# numeric eigenvalue class -> sphere label
_NUMERIC_TO_SPHERE = {
    "saddle": "saddle",
    "stable_node": "stable_node",
    "stable_focus": "stable_node",
    "unstable_node": "unstable_node",
    "unstable_focus": "unstable_node",
}


def sphere_stage(side: Side) -> Stage:
    if side not in ("L", "R"):
        raise ParameterError(f"side must be 'L' or 'R', got {side!r}")
    return Stage.SPHERE_L if side == "L" else Stage.SPHERE_R


def phi0(side: Side, gamma: GammaVector) -> float:
    return gamma.phiL0 if side == "L" else gamma.phiR0


@dataclass
class SphereEquilibrium:
    """One equilibrium of a sphere, located on rho = 0 of a chart."""

    label: str
    side: Side
    chart: ChartId
    coords: tuple[float, float]
    eigenvalues: np.ndarray
    classification: str

    @property
    def location(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "side": self.side,
            "chart": str(self.chart),
            "coords": [float(c) for c in self.coords],
            "eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
            "classification": self.classification,
        }


def z_point(side: Side, gamma: GammaVector, offset: float) -> Optional[tuple[float, float]]:
    """(Y, D) of z in chart rbar1, or None when z is absent at this offset."""
    k = gamma.k
    alpha, beta = gamma.alpha, gamma.beta
    if side == "L":
        if offset >= 0:
            return None
        D = (-offset) ** (-1.0 / k)
        Y = -1.0 / alpha - (beta / alpha**2) * gamma.phiL0 * (-offset) ** (-(k + 1))
        return Y, D
    if offset <= 0:
        return None
    s = alpha + beta
    D = offset ** (-1.0 / k)
    Y = 1.0 / s + beta * gamma.phiR0 * offset ** (-(k + 1)) / s**2
    return Y, D


def z_trace(side: Side, gamma: GammaVector, offset: float) -> float:
    """Closed-form trace of the rbar1 Jacobian at z."""
    k = gamma.k
    alpha, beta = gamma.alpha, gamma.beta
    if side == "L":
        c = beta * gamma.phiL0 / alpha
        return -(1.0 + alpha) + k * c * (-offset) ** (-(k + 1))
    s = alpha + beta
    return -(s + 1.0) + k * (beta / s) * gamma.phiR0 * offset ** (-(k + 1))


def expected_equilibria(side: Side, gamma: GammaVector, offset: float) -> list[tuple[str, str, tuple[float, float], str]]:
    """(label, chart name, coords, expected type) from the closed-form catalogue."""
    alpha, beta = gamma.alpha, gamma.beta
    phi = phi0(side, gamma)
    if side == "L":
        q_w = (-(1.0 - alpha) / alpha, 0.0)
        q_s = (0.0, 0.0)
        q_r = (0.0, -beta * phi / alpha**2)
        r_type = "nonhyperbolic_saddle" if offset < 0 else "nonhyperbolic_node"
        w_type, s_type = "saddle", "unstable_node"
    else:
        s = alpha + beta
        q_w = (0.0, 0.0)
        q_s = (-(s - 1.0) / s, 0.0)
        q_r = (0.0, beta * phi / s**2)
        r_type = "nonhyperbolic_saddle" if offset > 0 else "nonhyperbolic_node"
        w_type, s_type = "saddle", "unstable_node"
    catalogue = [
        ("q_w", "rbar1", q_w, w_type),
        ("q_s", "rbar1", q_s, s_type),
        ("q_f", "deltabar1", (0.0, 0.0), "stable_node"),
        ("q_r", "deltabar1", q_r, r_type),
        ("a", "ybar1", (0.0, 0.0), "saddle"),
        ("b", "ybar_neg1", (0.0, 0.0), "saddle"),
    ]
    z = z_point(side, gamma, offset)
    if z is not None:
        tr = z_trace(side, gamma, offset)
        if abs(tr) < CENTER_ATOL:
            z_type = "nonhyperbolic_node"
        else:
            z_type = "stable_node" if tr < 0 else "unstable_node"
        catalogue.append(("z", "rbar1", z, z_type))
    return catalogue


def _refine(field, guess: tuple[float, float], label: str) -> np.ndarray:
    u = np.asarray(guess, dtype=float)
    if np.max(np.abs(field(0.0, u))) < NEWTON_TOL:
        return u
    sol = root(lambda v: field(0.0, v), u, method="hybr", options={"xtol": 1e-14})
    if not sol.success or np.max(np.abs(field(0.0, sol.x))) >= NEWTON_TOL:
        raise ConvergenceError(f"Newton refinement of {label} failed: {sol.message}")
    return sol.x


def _numeric_type(eigenvalues: np.ndarray, expected: str) -> str:
    if expected.startswith("nonhyperbolic"):
        real = np.sort(eigenvalues.real)
        has_center = np.any(np.abs(real) < CENTER_ATOL)
        return expected if has_center else classify_eigenvalues(eigenvalues)
    return _NUMERIC_TO_SPHERE.get(classify_eigenvalues(eigenvalues), "nonhyperbolic_node")


def catalog_equilibria(side: Side, sp: ScaledParams, gamma: GammaVector) -> list[SphereEquilibrium]:
    """Six or seven equilibria of a sphere, refined by Newton and classified.

    z is present when eta1 < eta1^L(mu1) on the left sphere and when
    eta1 > eta1^R(mu1) on the right one. Foci are reported as nodes.

    Raises:
        ClassificationMismatchError: If an eigenvalue pattern contradicts the catalogue
        ConvergenceError: If Newton refinement fails
    """
    stage = sphere_stage(side)
    offset = sp.offset(gamma, side)
    found = []
    for label, name, guess, expected in expected_equilibria(side, gamma, offset):
        field = sphere_planar_field(stage, name, gamma, offset)
        u = _refine(field, guess, label)
        eigenvalues = np.linalg.eigvals(jacobian_fd(field, u))
        numeric = _numeric_type(eigenvalues, expected)
        if numeric != expected:
            raise ClassificationMismatchError(
                f"{label} on sphere {side}: expected {expected}, eigenvalues give {numeric} "
                f"({np.round(eigenvalues, 8)})"
            )
        found.append(
            SphereEquilibrium(
                label=label,
                side=side,
                chart=chart(stage, name),
                coords=(float(u[0]), float(u[1])),
                eigenvalues=eigenvalues,
                classification=expected,
            )
        )
    logger.debug(f"Sphere {side} at offset {offset:.6g}: {[e.label for e in found]}")
    return found
