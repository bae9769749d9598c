"""Melnikov sign along the left-sphere connection in chart ybar_neg1."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from substrate_oscillator.blowup.charts import ScaledParams, Stage
from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.exceptions import NonMonotoneOrbitError
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.numerics.equilibria import jacobian_fd

logger = logging.getLogger(__name__)

# slack for interpolation noise in the monotonicity test
MONOTONE_ATOL = 1e-13


@dataclass
class MelnikovResult:
    orbit: np.ndarray
    integral: float
    integral_sign: int
    integrand_sign_uniform: bool
    integrand: np.ndarray

    def to_record(self) -> dict:
        return {
            "integral": self.integral,
            "integral_sign": self.integral_sign,
            "integrand_sign_uniform": self.integrand_sign_uniform,
        }


def is_monotone_connection(orbit: np.ndarray, atol: float = MONOTONE_ATOL) -> bool:
    """r4 decreasing and delta4 increasing along a chart ybar_neg1 sample."""
    d = np.diff(np.asarray(orbit, dtype=float), axis=0)
    return bool(np.all(d[:, 0] < atol) and np.all(d[:, 1] > -atol))


def eta_derivative(gamma: GammaVector, orbit: np.ndarray) -> np.ndarray:
    """d/d eta1 of the chart ybar_neg1 field on rho = 0."""
    k = gamma.k
    r, d = orbit[:, 0], orbit[:, 1]
    return np.column_stack(
        [r ** (2 * k + 2) * d**k / (k + 1), r ** (2 * k + 1) * d ** (k + 1) / (k * (k + 1))]
    )


def _orbit_times(field, orbit: np.ndarray) -> np.ndarray:
    """Flow time along a sampled orbit from arclength over speed."""
    speed = np.linalg.norm(np.array([field(0.0, u) for u in orbit]), axis=1)
    ds = np.linalg.norm(np.diff(orbit, axis=0), axis=1)
    dt = ds * 0.5 * (1.0 / speed[:-1] + 1.0 / speed[1:])
    return np.concatenate([[0.0], np.cumsum(dt)])


def melnikov_check(
    orbit: np.ndarray,
    sp: ScaledParams,
    gamma: GammaVector,
    times: Optional[np.ndarray] = None,
    anchor: Optional[int] = None,
) -> MelnikovResult:
    """Sign of the Melnikov integral of the left connection with respect to eta1.

    Integrates (X ^ d_eta X) exp(-int div X) along the sampled orbit by the
    trapezoid rule, the divergence being integrated from ``anchor`` (the middle
    sample by default).

    Raises:
        NonMonotoneOrbitError: If r4 does not decrease or delta4 does not increase
    """
    orbit = np.asarray(orbit, dtype=float)
    if len(orbit) < 3 or not is_monotone_connection(orbit):
        raise NonMonotoneOrbitError("the orbit sample is not a monotone r4/delta4 connection")
    field = sphere_planar_field(Stage.SPHERE_L, "ybar_neg1", gamma, sp.offset(gamma, "L"))
    if times is None:
        times = _orbit_times(field, orbit)
    times = np.asarray(times, dtype=float)

    X = np.array([field(0.0, u) for u in orbit])
    dX = eta_derivative(gamma, orbit)
    wedge = X[:, 0] * dX[:, 1] - X[:, 1] * dX[:, 0]
    divergence = np.array([np.trace(jacobian_fd(field, u)) for u in orbit])
    cumulative = cumulative_trapezoid(divergence, times, initial=0.0)
    anchor = len(orbit) // 2 if anchor is None else anchor
    weight = np.exp(-(cumulative - cumulative[anchor]))
    integrand = wedge * weight
    integral = float(trapezoid(integrand, times))

    nonzero = integrand[np.abs(integrand) > 0]
    uniform = bool(len(nonzero) and (np.all(nonzero < 0) or np.all(nonzero > 0)))
    result = MelnikovResult(
        orbit=orbit,
        integral=integral,
        integral_sign=int(np.sign(integral)),
        integrand_sign_uniform=uniform,
        integrand=integrand,
    )
    logger.info(f"Melnikov integral {integral:.6e} (uniform sign: {uniform})")
    return result
