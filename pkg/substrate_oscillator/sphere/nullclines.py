"""Nullclines of the left-sphere field in chart ybar_neg1 on rho = 0.

With F4(delta) = alpha - (beta phi/alpha) delta^m and u = r^(k+1):

    r4' = -r (A - G)/(k+1),   delta4' = delta (k A + G)/m
    A = u - F4,   G = u (F4 + r^k delta^k offset)

A fold of the delta4-nullcline sits at u = (2k+1) F4/(k + F4) where the
level q(delta) below equals -1/offset; q vanishes at both ends of
(0, delta4_0) and has a single interior maximum, so there are 0, 1 or 2 folds.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from substrate_oscillator.blowup.charts import ScaledParams
from substrate_oscillator.exceptions import ParameterError
from substrate_oscillator.model.system import GammaVector

logger = logging.getLogger(__name__)

FOLD_RTOL = 1e-10
TOPOLOGIES = {0: "a", 1: "b", 2: "c"}


@dataclass
class NullclineFolds:
    count: int
    topology: str
    delta4_0: float
    locations: list[tuple[float, float]] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "count": self.count,
            "topology": self.topology,
            "delta4_0": self.delta4_0,
            "locations": [list(p) for p in self.locations],
        }


def delta4_zero(gamma: GammaVector) -> float:
    """delta4 of q_r in chart ybar_neg1, the root of F4."""
    return (gamma.alpha**2 / (gamma.beta * gamma.phiL0)) ** (1.0 / gamma.m)


def _F4(gamma: GammaVector, delta: float) -> float:
    return gamma.alpha - gamma.beta * gamma.phiL0 / gamma.alpha * delta**gamma.m


def _fold_level(gamma: GammaVector, delta: float) -> float:
    k = gamma.k
    F4 = _F4(gamma, delta)
    if F4 <= 0 or delta <= 0:
        return 0.0
    e = (2 * k + 1) / (k + 1)
    return (2 * k + 1) ** e * delta**k * F4 ** (k / (k + 1)) / ((k + 1) * (k + F4) ** e)


def nullcline_folds(sp: ScaledParams, gamma: GammaVector) -> NullclineFolds:
    """Number and location (r4, delta4) of the folds of the delta4-nullcline."""
    k = gamma.k
    offset = sp.offset(gamma, "L")
    d0 = delta4_zero(gamma)
    if offset >= 0:
        return NullclineFolds(0, TOPOLOGIES[0], d0)

    level = -1.0 / offset
    best = minimize_scalar(
        lambda d: -_fold_level(gamma, d), bounds=(0.0, d0), method="bounded", options={"xatol": 1e-13}
    )
    d_star, q_max = float(best.x), -float(best.fun)

    def to_point(d: float) -> tuple[float, float]:
        F4 = _F4(gamma, d)
        u = (2 * k + 1) * F4 / (k + F4)
        return u ** (1.0 / (k + 1)), d

    if abs(q_max - level) <= FOLD_RTOL * level:
        locations = [to_point(d_star)]
    elif q_max < level:
        locations = []
    else:
        g = lambda d: _fold_level(gamma, d) - level  # noqa: E731
        locations = [
            to_point(brentq(g, 0.0, d_star, xtol=1e-14)),
            to_point(brentq(g, d_star, d0, xtol=1e-14)),
        ]
    count = len(locations)
    logger.debug(f"delta4-nullcline at offset {offset:.6g}: {count} fold(s), q_max {q_max:.6g}")
    return NullclineFolds(count, TOPOLOGIES[count], d0, locations)


def r4_nullcline(sp: ScaledParams, gamma: GammaVector, delta4) -> np.ndarray:
    """r4 on the r4-nullcline over delta4 values in [0, delta4_0], for eta1 < eta1^L(mu1).

    Solves r^(k+1)(1 - F4) - r^(2k+1) delta^k offset = F4, whose left side
    increases in r.
    """
    k = gamma.k
    offset = sp.offset(gamma, "L")
    if offset >= 0:
        raise ParameterError(f"the r4-nullcline graph needs eta1 < eta1^L(mu1), offset {offset:g}")
    values = []
    for d in np.atleast_1d(np.asarray(delta4, dtype=float)):
        F4 = _F4(gamma, d)
        if F4 <= 0:
            values.append(0.0)
            continue

        def psi(r: float) -> float:
            return r ** (k + 1) * (1.0 - F4) - r ** (2 * k + 1) * d**k * offset - F4

        hi = 1.0
        while psi(hi) < 0:
            hi *= 2.0
        values.append(brentq(psi, 0.0, hi, xtol=1e-14))
    return np.asarray(values)
