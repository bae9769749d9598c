"""Poincaré sections, return maps and limit cycles."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from substrate_oscillator.exceptions import ConvergenceError, NoReturnError
from substrate_oscillator.numerics.integrate import (
    IntegratorConfig,
    IvpField,
    Trajectory,
    integrate,
    negated,
)

logger = logging.getLogger(__name__)

CYCLE_SAMPLES = 2000
# time after which a crossing may count as a return
SECTION_T_MIN = 1e-3


@dataclass(frozen=True)
class Section:
    """An oriented line segment point + s * tangent, s in ``bounds``.

    A crossing counts when the orbit moves along ``orientation * normal``.
    """

    point: tuple[float, float]
    tangent: tuple[float, float]
    normal: tuple[float, float]
    orientation: int = 1
    bounds: tuple[float, float] = (-np.inf, np.inf)

    @classmethod
    def horizontal(cls, y: float, x_range: tuple[float, float], upward: bool = True) -> "Section":
        """y = const with s = x, crossed upward or downward."""
        return cls((0.0, y), (1.0, 0.0), (0.0, 1.0), 1 if upward else -1, x_range)

    @classmethod
    def vertical(cls, x: float, y_range: tuple[float, float], rightward: bool = True) -> "Section":
        """x = const with s = y, crossed to the right or to the left."""
        return cls((x, 0.0), (0.0, 1.0), (1.0, 0.0), 1 if rightward else -1, y_range)

    @classmethod
    def through(cls, state, direction, halfwidth: float) -> "Section":
        """Segment through ``state`` perpendicular to ``direction``, crossed along it."""
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(
            (float(state[0]), float(state[1])),
            (float(-n[1]), float(n[0])),
            (float(n[0]), float(n[1])),
            1,
            (-halfwidth, halfwidth),
        )

    def signed_distance(self, u: np.ndarray) -> float:
        return float(np.dot(self.normal, np.asarray(u[:2]) - np.asarray(self.point)))

    def coordinate(self, u: np.ndarray) -> float:
        return float(np.dot(self.tangent, np.asarray(u[:2]) - np.asarray(self.point)))

    def at(self, s: float) -> np.ndarray:
        return np.asarray(self.point, dtype=float) + s * np.asarray(self.tangent, dtype=float)

    def contains(self, s: float) -> bool:
        return self.bounds[0] <= s <= self.bounds[1]


def _section_event(section: Section, t_min: float):
    orientation = float(section.orientation)

    def event(t: float, u: np.ndarray) -> float:
        if abs(t) <= t_min:
            return orientation
        return section.signed_distance(u)

    event.terminal = True
    event.direction = orientation
    return event


def poincare_return(
    field: IvpField,
    section: Section,
    state,
    cfg: Optional[IntegratorConfig] = None,
    t_max: Optional[float] = None,
    t_min: float = SECTION_T_MIN,
) -> tuple[np.ndarray, float]:
    """First oriented crossing of ``section`` inside its bounds.

    Crossings outside the bounds are stepped over by restarting from them.

    Returns:
        (state on the section, transit time)

    Raises:
        NoReturnError: If no crossing occurs before t_max
    """
    cfg = cfg or IntegratorConfig.from_settings()
    t_max = t_max or cfg.return_t_max
    u = np.asarray(state, dtype=float)
    elapsed = 0.0
    event = _section_event(section, t_min)
    while elapsed < t_max:
        traj = integrate(field, u, (0.0, t_max - elapsed), cfg, events=[event], dense=False)
        if not traj.terminated or len(traj.t_events[0]) == 0:
            break
        t_hit = float(traj.t_events[0][0])
        u = np.asarray(traj.y_events[0][0], dtype=float)
        elapsed += t_hit
        s = section.coordinate(u)
        if section.contains(s):
            return u, elapsed
        logger.debug(f"Crossing at s={s:.6g} outside {section.bounds}; continuing")
    raise NoReturnError(f"no return to the section within t = {t_max:g}")


def return_map(
    field: IvpField, section: Section, cfg: IntegratorConfig, s: float, t_max: Optional[float] = None
) -> tuple[float, float]:
    """(P(s), transit time) in section coordinates."""
    u, t = poincare_return(field, section, section.at(s), cfg, t_max=t_max)
    return section.coordinate(u), t


@dataclass
class LimitCycle:
    """One period of a periodic orbit with its summary numbers."""

    samples: np.ndarray
    times: np.ndarray
    period: float
    max_x: float
    l2_norm: float
    multiplier: float
    stability: str
    section_coordinate: float

    def summary(self) -> dict:
        return {
            "period": self.period,
            "max_x": self.max_x,
            "l2_norm": self.l2_norm,
            "multiplier": self.multiplier,
            "stability": self.stability,
        }

    def rows(self) -> list[tuple]:
        return [(float(t), float(u[0]), float(u[1])) for t, u in zip(self.times, self.samples)]


def l2_norm(times: np.ndarray, samples: np.ndarray) -> float:
    """sqrt of the period-normalized integral of |u|^2 (the continuation-software L2 norm)."""
    period = times[-1] - times[0]
    tau = (times - times[0]) / period
    return float(np.sqrt(trapezoid(np.sum(samples**2, axis=1), tau)))


def _multiplier(
    field: IvpField, section: Section, cfg: IntegratorConfig, s_star: float, p_star: float
) -> float:
    h = cfg.multiplier_step * max(1.0, abs(s_star))
    if not section.contains(s_star + h):
        h = -h
    p_h, _ = return_map(field, section, cfg, s_star + h)
    return (p_h - p_star) / h


def find_limit_cycle(
    field: IvpField,
    guess_state,
    section: Section,
    cfg: Optional[IntegratorConfig] = None,
    reverse_time: bool = False,
    n_samples: int = CYCLE_SAMPLES,
) -> LimitCycle:
    """Periodic orbit through a fixed point of the return map on ``section``.

    Damped Newton on s -> P(s) - s with a finite-difference slope. Repelling
    cycles are found with ``reverse_time``; their multiplier is reported for the
    forward flow.

    Raises:
        ConvergenceError: If the iteration diverges or the orbit collapses
        NoReturnError: If the orbit stops returning to the section
    """
    cfg = cfg or IntegratorConfig.from_settings()
    flow = negated(field) if reverse_time else field
    s = section.coordinate(np.asarray(guess_state, dtype=float))
    if not section.contains(s):
        raise ConvergenceError(f"initial guess s={s:.6g} is outside the section {section.bounds}")

    for iteration in range(cfg.cycle_max_iter):
        p, _ = return_map(flow, section, cfg, s)
        residual = p - s
        logger.debug(f"Cycle iteration {iteration}: s={s:.12g}, P(s)-s={residual:.3e}")
        if abs(residual) < cfg.cycle_tol * max(1.0, abs(s)):
            break
        slope = _multiplier(flow, section, cfg, s, p)
        if abs(slope - 1.0) < 1e-12:
            raise ConvergenceError(f"return map slope is 1 at s={s:.6g}")
        step = -residual / (slope - 1.0)
        # damp towards the plain fixed-point step when Newton leaves the section
        while not section.contains(s + step) and abs(step) > abs(residual) * 1e-3:
            step *= 0.5
        s_next = s + step
        if not section.contains(s_next):
            s_next = p
        s = s_next
    else:
        raise ConvergenceError(f"no fixed point of the return map after {cfg.cycle_max_iter} iterations")

    p, period = return_map(flow, section, cfg, s)
    slope = _multiplier(flow, section, cfg, s, p)
    multiplier = 1.0 / slope if reverse_time else slope
    start = section.at(s)
    traj = integrate(flow, start, (0.0, period), cfg, t_eval=np.linspace(0.0, period, n_samples))
    samples = traj.states
    times = traj.t
    if reverse_time:
        samples = samples[::-1]
        times = period - times[::-1]
    amplitude = float(np.max(np.ptp(samples, axis=0)))
    if amplitude < 10 * cfg.cycle_tol:
        raise ConvergenceError("cycle collapsed onto an equilibrium")
    cycle = LimitCycle(
        samples=samples,
        times=times,
        period=float(period),
        max_x=float(np.max(samples[:, 0])),
        l2_norm=l2_norm(times, samples),
        multiplier=float(multiplier),
        stability="attracting" if abs(multiplier) < 1.0 else "repelling",
        section_coordinate=float(s),
    )
    logger.info(
        f"Found {cycle.stability} cycle: period {cycle.period:.6g}, max x {cycle.max_x:.6g}, "
        f"multiplier {cycle.multiplier:.3e}"
    )
    return cycle


def return_map_lipschitz(
    field: IvpField,
    cycle: LimitCycle,
    section: Section,
    cfg: Optional[IntegratorConfig] = None,
    radius: float = 1e-3,
    n: int = 4,
) -> float:
    """Largest chord slope |P(s) - P(s*)|/|s - s*| over a small neighbourhood of the fixed point."""
    cfg = cfg or IntegratorConfig.from_settings()
    s_star = cycle.section_coordinate
    p_star, _ = return_map(field, section, cfg, s_star)
    worst = 0.0
    for offset in radius * np.geomspace(1.0, 1.0 / 2 ** (n - 1), n):
        for s in (s_star - offset, s_star + offset):
            if section.contains(s):
                p, _ = return_map(field, section, cfg, s)
                worst = max(worst, abs(p - p_star) / offset)
    return worst


def trajectory_residence(traj: Trajectory, x_switch: float = 1.0, band: float = 0.05) -> float:
    """Fraction of the integration time spent with |x - x_switch| < band."""
    t = traj.t
    inside = (np.abs(traj.states[:, 0] - x_switch) < band).astype(float)
    total = t[-1] - t[0]
    if total <= 0:
        return 0.0
    return float(trapezoid(inside, t) / total)
