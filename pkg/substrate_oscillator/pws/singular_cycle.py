"""Singular cycles of the PWL limit, built from closed-form linear flows."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq, newton

from substrate_oscillator.exceptions import ConvergenceError, NoReturnError, ParameterError
from substrate_oscillator.model.system import ModelParams
from substrate_oscillator.pws.limits import LinearSystem, left_system, right_system

logger = logging.getLogger(__name__)

NODE_CUTOFF = 1e-8
SAMPLE_DT = 0.01
SWITCH_T_MAX = 500.0


@dataclass
class SingularCycle:
    """Two arcs of the PWL limit which together form a closed curve."""

    gammaL: np.ndarray
    gammaR: np.ndarray
    timesL: np.ndarray
    timesR: np.ndarray
    closure_gap: float
    crossing_point: Optional[tuple[float, float]] = None

    @property
    def polyline(self) -> np.ndarray:
        """gammaR followed by gammaL (the traversal order of the cycle)."""
        return np.vstack([self.gammaR, self.gammaL])

    def rows(self) -> list[tuple]:
        """(arc_id, t, x, y) rows for CSV export."""
        out = []
        for arc_id, times, arc in (("L", self.timesL, self.gammaL), ("R", self.timesR, self.gammaR)):
            out.extend((arc_id, float(t), float(u[0]), float(u[1])) for t, u in zip(times, arc))
        return out


def _orbit_to_node(
    system: LinearSystem, u0: np.ndarray, dt: float = SAMPLE_DT, cutoff: float = NODE_CUTOFF
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the orbit of u0 until it is within ``cutoff`` of the node; end on the node."""
    node = system.node
    step = expm(system.matrix * dt)
    deviation = np.asarray(u0, dtype=float) - node
    points = [node + deviation]
    while np.linalg.norm(deviation) >= cutoff:
        deviation = step @ deviation
        points.append(node + deviation)
        if len(points) > 10_000_000:
            raise ConvergenceError("linear orbit does not approach its node")
    points[-1] = node.copy()
    times = dt * np.arange(len(points))
    return np.array(points), times


def _orbit_to_switch(
    system: LinearSystem, u0: np.ndarray, dt: float = SAMPLE_DT, t_max: float = SWITCH_T_MAX
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the orbit of a point on x = 1 until it next returns to x = 1."""
    u0 = np.asarray(u0, dtype=float)
    node = system.node
    step = expm(system.matrix * dt)
    deviation = u0 - node
    points = [u0]
    side = 0.0
    n_steps = int(t_max / dt)
    for i in range(1, n_steps + 1):
        deviation = step @ deviation
        point = node + deviation
        offset = point[0] - 1.0
        if side == 0.0:
            side = np.sign(offset)
        elif np.sign(offset) == -side:
            t_cross = brentq(
                lambda t: system.flow(u0, t)[0] - 1.0, (i - 1) * dt, i * dt, xtol=1e-14
            )
            crossing = system.flow(u0, t_cross)
            crossing[0] = 1.0
            times = np.append(dt * np.arange(i), t_cross)
            return np.vstack([points, crossing]), times
        points.append(point)
    raise NoReturnError(f"orbit from {tuple(u0)} does not return to x = 1 within t = {t_max:g}")


def build_singular_cycle(p: ModelParams) -> SingularCycle:
    """Gamma_0: left orbit of p^R and right orbit of p^L at eta = 1, mu = 0.

    Raises:
        ParameterError: If eta != 1 or mu != 0
    """
    if p.eta != 1.0 or p.mu != 0.0:
        raise ParameterError(f"the singular cycle needs eta = 1, mu = 0 (got {p.eta:g}, {p.mu:g})")
    pL = np.array([1.0, 1.0 / p.alpha])
    pR = np.array([1.0, 1.0 / (p.alpha + p.beta)])
    gammaL, timesL = _orbit_to_node(left_system(p), pR)
    gammaR, timesR = _orbit_to_node(right_system(p), pL)
    gap = max(np.linalg.norm(gammaL[-1] - gammaR[0]), np.linalg.norm(gammaR[-1] - gammaL[0]))
    logger.debug(f"Singular cycle: {len(gammaL)} + {len(gammaR)} samples, gap {gap:.2e}")
    if gap > 1e-6:
        raise ConvergenceError(f"singular cycle does not close (gap {gap:.2e})")
    return SingularCycle(gammaL=gammaL, gammaR=gammaR, timesL=timesL, timesR=timesR, closure_gap=gap)


def generic_singular_cycle(p: ModelParams) -> SingularCycle:
    """Singular cycle through a regular crossing point, for mu < 0.

    At eta = eta^L(mu) the right orbit of p^L returns to x = 1 at a crossing
    point q^R; the left orbit of q^R is asymptotic to z^L = p^L. The eta of
    ``p`` is replaced by eta^L(mu).
    """
    if p.mu >= 0:
        raise ParameterError(f"the crossing singular cycle needs mu < 0, got {p.mu:g}")
    p = p.with_(eta=1.0 + p.mu / p.alpha)
    pL = np.array([1.0, 1.0 / p.alpha])
    gammaR, timesR = _orbit_to_switch(right_system(p), pL)
    q = gammaR[-1]
    if not is_regular_crossing(p, q):
        raise ConvergenceError(f"return point {tuple(q)} is not a regular crossing")
    gammaL, timesL = _orbit_to_node(left_system(p), q)
    gap = float(np.linalg.norm(gammaL[-1] - gammaR[0]))
    return SingularCycle(
        gammaL=gammaL,
        gammaR=gammaR,
        timesL=timesL,
        timesR=timesR,
        closure_gap=gap,
        crossing_point=(float(q[0]), float(q[1])),
    )


def is_regular_crossing(p: ModelParams, q: np.ndarray) -> bool:
    """Both linear fields point to x < 1 at q (transversal crossing from the right)."""
    return bool(left_system(p)(0.0, q)[0] < 0 and right_system(p)(0.0, q)[0] < 0)


def crossing_cycle(p: ModelParams, tol: float = 1e-12) -> SingularCycle:
    """Crossing periodic orbit of the PWL limit for mu < 0, eta^L(mu) < eta < eta^R(mu).

    Fixed point of the map y -> (left flow to x = 1) -> (right flow to x = 1),
    found by secant iteration started from the crossing point at eta^L(mu).
    """
    if p.mu >= 0:
        raise ParameterError(f"crossing cycles need mu < 0, got {p.mu:g}")
    etaL, etaR = 1.0 + p.mu / p.alpha, 1.0 + p.mu / (p.alpha + p.beta)
    if not etaL < p.eta < etaR:
        raise ParameterError(f"eta={p.eta:g} outside ({etaL:g}, {etaR:g})")
    left, right = left_system(p), right_system(p)

    def half_maps(y: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        arc_left, t_left = _orbit_to_switch(left, np.array([1.0, y]))
        arc_right, t_right = _orbit_to_switch(right, arc_left[-1])
        return arc_left, t_left, arc_right, t_right

    def displacement(y: float) -> float:
        return float(half_maps(y)[2][-1][1]) - y

    y0 = generic_singular_cycle(p).crossing_point[1]
    y1 = y0 + displacement(y0)
    try:
        y_star = newton(displacement, y0, x1=y1, tol=tol, maxiter=50)
    except RuntimeError as e:
        raise ConvergenceError(f"crossing-cycle map did not converge: {e}") from e
    arc_left, t_left, arc_right, t_right = half_maps(float(y_star))
    gap = float(np.linalg.norm(arc_right[-1] - arc_left[0]))
    logger.debug(f"Crossing cycle at y = {y_star:.15g}, gap {gap:.2e}")
    return SingularCycle(
        gammaL=arc_left,
        gammaR=arc_right,
        timesL=t_left,
        timesR=t_right,
        closure_gap=gap,
        crossing_point=(1.0, float(y_star)),
    )
