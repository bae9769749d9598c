"""Truncated expansions of the local invariant manifolds used as shooting seeds.

Left sphere:
    U^L at q_w (chart rbar1):      Y = B + D^k (offset + D^(k^2) c_U),  B = -(1-alpha)/alpha
    C^L at q_r (chart deltabar1):  Y = -beta phi/alpha^2
                                       - R^(k+1)/alpha (1 + R^k alpha^2/(beta k phi) (offset + R))

c_U is -beta phi/alpha^2 in the printed series and -beta phi/(alpha^2 (1 + k alpha))
when re-derived from invariance. The right-sphere seeds are the images of the
derived left ones under the duality map.
"""

import logging

from substrate_oscillator.blowup.charts import ChartPoint, ScaledParams, point
from substrate_oscillator.exceptions import SeedCutoffError
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.sphere.equilibria import Side, sphere_stage

logger = logging.getLogger(__name__)

SEED_CUTOFF = 0.25


def _check_offset(value: float, name: str, cutoff: float) -> None:
    if not 0 < value < cutoff:
        raise SeedCutoffError(f"{name} = {value:g} must lie in (0, {cutoff:g})")


def unstable_seed_y(
    side: Side, gamma: GammaVector, offset: float, delta1: float, derived: bool = False
) -> float:
    """Y on the local unstable manifold of q_w at D = delta1 in chart rbar1."""
    k, m = gamma.k, gamma.m
    alpha, beta = gamma.alpha, gamma.beta
    if side == "L":
        phi = gamma.phiL0
        B = -(1.0 - alpha) / alpha
        second = -beta * phi / alpha**2
        if derived:
            second /= 1.0 + k * alpha
        return B + delta1**k * (offset + delta1 ** (k * k) * second)
    s = alpha + beta
    return delta1**k * offset / s + delta1**m * beta * gamma.phiR0 / (s * (k + s))


def center_seed_y(side: Side, gamma: GammaVector, offset: float, r2: float) -> float:
    """Y on the local centre manifold of q_r at R = r2 in chart deltabar1."""
    k = gamma.k
    alpha, beta = gamma.alpha, gamma.beta
    if side == "L":
        phi = gamma.phiL0
        bend = r2**k * alpha**2 / (beta * k * phi) * (offset + r2)
        return -beta * phi / alpha**2 - r2 ** (k + 1) / alpha * (1.0 + bend)
    s = alpha + beta
    phi = gamma.phiR0
    bend = r2**k * s**2 / (beta * k * phi) * (offset - r2)
    return beta * phi / s**2 + r2 ** (k + 1) / s * (1.0 - bend)


def local_unstable_seed(
    side: Side, sp: ScaledParams, gamma: GammaVector, delta1: float, cutoff: float = SEED_CUTOFF
) -> ChartPoint:
    """Point of the printed unstable-manifold series of q_w, on rho = 0 of chart rbar1.

    Raises:
        SeedCutoffError: If delta1 is not in (0, cutoff)
    """
    _check_offset(delta1, "delta1", cutoff)
    y1 = unstable_seed_y(side, gamma, sp.offset(gamma, side), delta1)
    return point(sphere_stage(side), "rbar1", (0.0, y1, delta1), k=gamma.k)


def derived_unstable_seed(
    side: Side, sp: ScaledParams, gamma: GammaVector, delta1: float, cutoff: float = SEED_CUTOFF
) -> ChartPoint:
    """As local_unstable_seed with the second coefficient fixed by invariance."""
    _check_offset(delta1, "delta1", cutoff)
    y1 = unstable_seed_y(side, gamma, sp.offset(gamma, side), delta1, derived=True)
    return point(sphere_stage(side), "rbar1", (0.0, y1, delta1), k=gamma.k)


def local_center_seed(
    side: Side, sp: ScaledParams, gamma: GammaVector, r2: float, cutoff: float = SEED_CUTOFF
) -> ChartPoint:
    """Point of the centre-manifold series of q_r, on rho = 0 of chart deltabar1.

    Raises:
        SeedCutoffError: If r2 is not in (0, cutoff)
    """
    _check_offset(r2, "r2", cutoff)
    y2 = center_seed_y(side, gamma, sp.offset(gamma, side), r2)
    return point(sphere_stage(side), "deltabar1", (0.0, r2, y2), k=gamma.k)
