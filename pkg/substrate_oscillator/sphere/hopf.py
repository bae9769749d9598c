"""Hopf bifurcation of z on the spheres: closed form, numeric check, criticality."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, root

from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.exceptions import BracketError, ConvergenceError
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.numerics.equilibria import jacobian_fd
from substrate_oscillator.numerics.hopf import first_lyapunov_coefficient
from substrate_oscillator.sphere.equilibria import Side, phi0, sphere_stage, z_point

logger = logging.getLogger(__name__)


@dataclass
class HopfResult:
    side: Side
    eta_H: float
    eta_H_numeric: float
    lyapunov_sign: int
    lyapunov_coefficient: float
    determinant: float

    def to_record(self) -> dict:
        return {
            "side": self.side,
            "eta_H": self.eta_H,
            "eta_H_numeric": self.eta_H_numeric,
            "lyapunov_sign": self.lyapunov_sign,
            "determinant": self.determinant,
        }


def hopf_offset(side: Side, gamma: GammaVector) -> float:
    """eta1 - eta1^{L/R}(mu1) at the Hopf point of z."""
    k = gamma.k
    alpha, beta = gamma.alpha, gamma.beta
    phi = phi0(side, gamma)
    if side == "L":
        return -((beta * k * phi / (alpha * (alpha + 1.0))) ** (1.0 / (k + 1)))
    s = alpha + beta
    return (beta * k * phi / (s * (s + 1.0))) ** (1.0 / (k + 1))


def refined_z(side: Side, gamma: GammaVector, offset: float) -> np.ndarray:
    """z in chart rbar1, Newton-polished on the rho = 0 field."""
    guess = z_point(side, gamma, offset)
    if guess is None:
        raise ConvergenceError(f"no z on sphere {side} at offset {offset:g}")
    field = sphere_planar_field(sphere_stage(side), "rbar1", gamma, offset)
    sol = root(lambda v: field(0.0, v), np.asarray(guess), method="hybr", options={"xtol": 1e-14})
    if not sol.success:
        logger.debug(f"Newton polish of z on sphere {side} failed ({sol.message}); using the closed form")
        return np.asarray(guess)
    return sol.x


def z_jacobian(side: Side, gamma: GammaVector, offset: float) -> np.ndarray:
    field = sphere_planar_field(sphere_stage(side), "rbar1", gamma, offset)
    return jacobian_fd(field, refined_z(side, gamma, offset))


def hopf_value(side: Side, mu1: float, gamma: GammaVector) -> HopfResult:
    """Hopf value of eta1 on a sphere, closed form and numeric.

    The numeric value is the root of the trace of the chart Jacobian along the
    z-branch, bracketed by a factor 4 on either side of the closed form.

    Raises:
        BracketError: If the trace does not change sign on the bracket
    """
    sphere_stage(side)
    reference = gamma.etaL(mu1) if side == "L" else gamma.etaR(mu1)
    closed = hopf_offset(side, gamma)

    def trace(offset: float) -> float:
        return float(np.trace(z_jacobian(side, gamma, offset)))

    lo, hi = sorted((closed * 4.0, closed / 4.0))
    t_lo, t_hi = trace(lo), trace(hi)
    if t_lo * t_hi > 0:
        raise BracketError(
            f"trace at z has one sign on [{lo:g}, {hi:g}] ({t_lo:.3g}, {t_hi:.3g})"
        )
    numeric = brentq(trace, lo, hi, xtol=1e-13, rtol=1e-13)

    field = sphere_planar_field(sphere_stage(side), "rbar1", gamma, numeric)
    z = refined_z(side, gamma, numeric)
    lyapunov = first_lyapunov_coefficient(field, z)
    determinant = float(np.linalg.det(jacobian_fd(field, z)))
    result = HopfResult(
        side=side,
        eta_H=reference + closed,
        eta_H_numeric=reference + numeric,
        lyapunov_sign=int(np.sign(lyapunov)),
        lyapunov_coefficient=lyapunov,
        determinant=determinant,
    )
    logger.info(
        f"Hopf on sphere {side}: eta_H = {result.eta_H:.10g} (numeric {result.eta_H_numeric:.10g}), "
        f"Lyapunov sign {result.lyapunov_sign:+d}"
    )
    return result
