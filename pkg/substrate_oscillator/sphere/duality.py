"""The right sphere as a left sphere in disguise, and cycle probes near Hopf.

On rho = 0 the map (Y, D) -> (-(1 - aL)/aL - Y/aL, D) of chart rbar1 carries
the right-sphere field at (alpha, beta, phiR(0), offset) onto aL times the
left-sphere field at (aL, beta, aL^3 phiR(0), -offset), aL = 1/(alpha + beta).
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from substrate_oscillator.blowup.charts import Stage
from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.config.settings import Settings, get_settings
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.numerics.integrate import IntegratorConfig, integrate, negated
from substrate_oscillator.sphere.equilibria import Side, sphere_stage
from substrate_oscillator.sphere.hopf import hopf_offset, hopf_value, refined_z
from substrate_oscillator.sphere.shooting import shoot_heteroclinic

logger = logging.getLogger(__name__)

PROBE_KICK = 1e-3
PROBE_T_MAX = 2000.0
PROBE_MIN_AMPLITUDE = 1e-4


def transform_gamma_to_left(gamma: GammaVector) -> GammaVector:
    """Left-sphere parameters whose problem is the right sphere of ``gamma``."""
    alpha_L = 1.0 / (gamma.alpha + gamma.beta)
    return GammaVector(
        k=gamma.k,
        alpha=alpha_L,
        beta=gamma.beta,
        phiL0=gamma.phiR0 * alpha_L**3,
        phiR0=gamma.phiR0,
    )


def dual_point(gamma: GammaVector, u) -> np.ndarray:
    """Image of a right-sphere rbar1 point (Y, D) in the transformed left sphere."""
    alpha_L = 1.0 / (gamma.alpha + gamma.beta)
    Y, D = u
    return np.array([-(1.0 - alpha_L) / alpha_L - Y / alpha_L, D])


def field_duality_residual(gamma: GammaVector, offset: float, n: int = 100, seed: int = 0) -> float:
    """Largest |X_L(Phi(u)) - aL DPhi X_R(u)| over random rbar1 points of the right sphere."""
    gamma_L = transform_gamma_to_left(gamma)
    alpha_L = gamma_L.alpha
    right = sphere_planar_field(Stage.SPHERE_R, "rbar1", gamma, offset)
    left = sphere_planar_field(Stage.SPHERE_L, "rbar1", gamma_L, -offset)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        u = np.array([rng.uniform(-1.5, 1.5), rng.uniform(0.1, 1.5)])
        x_r = right(0.0, u)
        pushed = alpha_L * np.array([-x_r[0] / alpha_L, x_r[1]])
        worst = max(worst, float(np.max(np.abs(left(0.0, dual_point(gamma, u)) - pushed))))
    return worst


def right_het_via_left(
    mu1: float, gamma: GammaVector, tol: Optional[float] = None, settings: Optional[Settings] = None
) -> float:
    """eta_Het^R(mu1) from the left-sphere pipeline on the transformed parameters."""
    left = shoot_heteroclinic("L", 0.0, transform_gamma_to_left(gamma), tol, settings)
    return gamma.etaR(mu1) - left.offset


@dataclass
class CycleProbe:
    side: Side
    offset: float
    detected: bool
    escaped: bool
    amplitude: float

    def to_record(self) -> dict:
        return {
            "side": self.side,
            "offset": self.offset,
            "detected": self.detected,
            "escaped": self.escaped,
            "amplitude": self.amplitude,
        }


def sphere_cycle_probe(
    side: Side, gamma: GammaVector, eta_offset: float = 0.01, settings: Optional[Settings] = None
) -> CycleProbe:
    """Look for the repelling cycle around z just on the stable side of the Hopf point.

    Integrates backwards from a small kick off z; the orbit leaves z and, when a
    repelling cycle surrounds it, settles on that cycle instead of escaping.
    """
    settings = settings or get_settings()
    sign = -1.0 if side == "L" else 1.0
    offset = hopf_offset(side, gamma) + sign * eta_offset
    field = sphere_planar_field(sphere_stage(side), "rbar1", gamma, offset)
    z = refined_z(side, gamma, offset)

    def escape(t: float, u: np.ndarray) -> float:
        return settings.escape_radius - float(np.max(np.abs(u)))

    escape.terminal, escape.direction = True, -1.0
    cfg = IntegratorConfig.from_settings(settings)
    start = z + np.array([PROBE_KICK, 0.0])
    traj = integrate(negated(field), start, (0.0, PROBE_T_MAX), cfg, events=[escape], dense=False)
    escaped = bool(len(traj.t_events[0]))
    tail = traj.states[len(traj.states) * 2 // 3 :]
    distance = np.linalg.norm(tail - z, axis=1)
    amplitude = float(np.max(np.ptp(tail, axis=0))) if len(tail) else 0.0
    detected = (
        not escaped and len(tail) > 0 and float(np.min(distance)) > PROBE_KICK and amplitude > PROBE_MIN_AMPLITUDE
    )
    logger.info(
        f"Cycle probe on sphere {side} at offset {offset:.6g}: "
        f"{'cycle' if detected else 'no cycle'} (amplitude {amplitude:.3g}, escaped {escaped})"
    )
    return CycleProbe(side, offset, detected, escaped, amplitude)


def het_hopf_ordering(
    gamma: GammaVector,
    mu1: float,
    eta_het_L: Optional[float] = None,
    eta_het_R: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> dict:
    """Whether eta_Het^L < eta_H^L and eta_H^R < eta_Het^R at this mu1 (reported only)."""
    if eta_het_L is None:
        eta_het_L = shoot_heteroclinic("L", mu1, gamma, settings=settings).eta_het
    if eta_het_R is None:
        eta_het_R = shoot_heteroclinic("R", mu1, gamma, settings=settings).eta_het
    hopf_L = hopf_value("L", mu1, gamma).eta_H
    hopf_R = hopf_value("R", mu1, gamma).eta_H
    report = {
        "eta_het_L": eta_het_L,
        "eta_H_L": hopf_L,
        "left_het_before_hopf": eta_het_L < hopf_L,
        "eta_het_R": eta_het_R,
        "eta_H_R": hopf_R,
        "right_hopf_before_het": hopf_R < eta_het_R,
    }
    if not (report["left_het_before_hopf"] and report["right_hopf_before_het"]):
        logger.warning(f"Heteroclinic/Hopf ordering differs from the expected one: {report}")
    return report
