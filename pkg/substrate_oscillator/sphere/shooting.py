"""Heteroclinic shooting between q_w and q_r on the spheres.

The unstable manifold U of q_w is flowed forward and the centre manifold C of
q_r backward until both meet a section; the gap between the two crossings is
bisected to zero in eta1. Left sphere: both legs run in chart ybar_neg1 and
the section is r4 = const slightly below q_w's abscissa, the gap is taken in
delta4. Right sphere: U runs in rbar1, C in deltabar1, and the section is the
common set D = 1 = R2 where both charts coincide; the gap is taken in Y.

A leg that misses the section is labelled by its fate: an escaping U or a
bounded C (absorbed by z) means eta1 is past the connection, a bounded U or an
escaping C means it is short of it.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from substrate_oscillator.blowup.charts import (
    ChartId,
    ScaledParams,
    chart,
    chart_change,
    section_abscissa,
)
from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.config.settings import Settings, get_settings
from substrate_oscillator.exceptions import BracketError, ConvergenceError, ParameterError
from substrate_oscillator.model.system import GammaVector
from substrate_oscillator.numerics.integrate import IntegratorConfig, Trajectory, integrate, negated
from substrate_oscillator.sphere.equilibria import Side, sphere_stage
from substrate_oscillator.sphere.manifolds import local_center_seed, local_unstable_seed

logger = logging.getLogger(__name__)

SHOOT_T_MAX = 1e7
SETTLE_TOL = 1e-12
SETTLE_DISTANCE = 0.05
DENSE_PER_STEP = 8

CROSSED = "crossed"
ESCAPED = "escaped"
BOUNDED = "bounded"


@dataclass(frozen=True)
class _Leg:
    name: str
    start: np.ndarray
    section_index: int
    section_value: float
    direction: float
    gap_index: int
    backward: bool
    method: Optional[str] = None


@dataclass
class Branch:
    """One manifold leg: its fate, its section crossing and its samples in leg time."""

    fate: str
    crossing: Optional[np.ndarray]
    times: np.ndarray
    states: np.ndarray


@dataclass
class HetShot:
    side: Side
    offset: float
    gap: Optional[float]
    unstable: Branch
    center: Branch


@dataclass
class HetResult:
    """A converged connection: eta1 value, residual gap and the connecting orbit."""

    side: Side
    mu1: float
    eta_het: float
    offset: float
    gap: float
    seed_offset: float
    orientation: int
    chart: ChartId
    times: np.ndarray
    orbit: np.ndarray

    def to_record(self) -> dict:
        return {
            "side": self.side,
            "mu1": self.mu1,
            "eta_het": self.eta_het,
            "offset": self.offset,
            "gap": self.gap,
            "seed_offset": self.seed_offset,
        }


def _side_sign(side: Side) -> float:
    """Direction of the deep bracket end: below eta^L on the left, above eta^R on the right."""
    return -1.0 if side == "L" else 1.0


def _reference(side: Side, gamma: GammaVector, mu1: float) -> float:
    return gamma.etaL(mu1) if side == "L" else gamma.etaR(mu1)


def _legs(
    side: Side, gamma: GammaVector, offset: float, seed: float, settings: Settings
) -> tuple[tuple[str, _Leg], tuple[str, _Leg]]:
    stage = sphere_stage(side)
    sp = ScaledParams(eta1=offset, mu1=0.0)
    u_seed = local_unstable_seed(side, sp, gamma, seed)
    c_seed = local_center_seed(side, sp, gamma, seed)
    if side == "L":
        target = chart(stage, "ybar_neg1")
        r_section = section_abscissa(gamma, settings.section_fraction)
        u_start = np.asarray(chart_change(u_seed, target).coords[1:])
        c_start = np.asarray(chart_change(c_seed, target).coords[1:])
        unstable = _Leg("U", u_start, 0, r_section, -1.0, 1, backward=False)
        center = _Leg("C", c_start, 0, r_section, 1.0, 1, backward=True, method="Radau")
        return ("ybar_neg1", unstable), ("ybar_neg1", center)
    unstable = _Leg("U", np.asarray(u_seed.coords[1:]), 1, 1.0, 1.0, 0, backward=False)
    center = _Leg("C", np.asarray(c_seed.coords[1:]), 0, 1.0, 1.0, 1, backward=True, method="Radau")
    return ("rbar1", unstable), ("deltabar1", center)


def _dense_samples(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    if traj.sol is None or len(traj.t) < 2:
        return traj.t, traj.states
    pieces = [
        np.linspace(t0, t1, DENSE_PER_STEP, endpoint=False) for t0, t1 in zip(traj.t[:-1], traj.t[1:])
    ]
    times = np.concatenate(pieces + [traj.t[-1:]])
    return times, np.asarray(traj.sol(times)).T


def _run_leg(field: Callable, leg: _Leg, cfg: IntegratorConfig, escape_radius: float) -> Branch:
    flow = negated(field) if leg.backward else field
    u0 = leg.start

    def section(t: float, u: np.ndarray) -> float:
        return u[leg.section_index] - leg.section_value

    def escape(t: float, u: np.ndarray) -> float:
        return escape_radius - float(np.max(np.abs(u)))

    def settle(t: float, u: np.ndarray) -> float:
        if np.linalg.norm(u - u0) < SETTLE_DISTANCE:
            return 1.0
        return float(np.linalg.norm(field(t, u))) - SETTLE_TOL

    section.terminal, section.direction = True, leg.direction
    escape.terminal, escape.direction = True, -1.0
    settle.terminal, settle.direction = True, -1.0

    traj = integrate(
        flow, u0, (0.0, SHOOT_T_MAX), cfg, events=[section, escape, settle], method=leg.method
    )
    times, states = _dense_samples(traj)
    if len(traj.t_events[0]):
        return Branch(CROSSED, np.asarray(traj.y_events[0][0]), times, states)
    fate = ESCAPED if len(traj.t_events[1]) else BOUNDED
    return Branch(fate, None, times, states)


def shoot_once(
    side: Side,
    gamma: GammaVector,
    offset: float,
    seed: float,
    cfg: IntegratorConfig,
    settings: Optional[Settings] = None,
) -> HetShot:
    """Flow both manifolds at one offset eta1 - eta1^{L/R}(mu1) and measure the gap."""
    settings = settings or get_settings()
    stage = sphere_stage(side)
    (u_chart, u_leg), (c_chart, c_leg) = _legs(side, gamma, offset, seed, settings)
    u_field = sphere_planar_field(stage, u_chart, gamma, offset)
    c_field = sphere_planar_field(stage, c_chart, gamma, offset)
    unstable = _run_leg(u_field, u_leg, cfg, settings.escape_radius)
    center = _run_leg(c_field, c_leg, cfg, settings.escape_radius)
    gap = None
    if unstable.fate == CROSSED and center.fate == CROSSED:
        gap = float(unstable.crossing[u_leg.gap_index] - center.crossing[c_leg.gap_index])
    logger.debug(
        f"Shot {side} at offset {offset:.12g}: U {unstable.fate}, C {center.fate}, gap {gap}"
    )
    return HetShot(side, offset, gap, unstable, center)


def gap_function(
    side: Side,
    gamma: GammaVector,
    offset: float,
    cfg: Optional[IntegratorConfig] = None,
    settings: Optional[Settings] = None,
) -> Optional[float]:
    """The section gap at one offset, or None when a leg misses the section."""
    settings = settings or get_settings()
    cfg = cfg or _shooting_config(settings)
    return shoot_once(side, gamma, offset, settings.seed_offset, cfg, settings).gap


def _label(shot: HetShot, orientation: int) -> int:
    """-1 short of the connection, +1 past it, 0 on it."""
    if shot.unstable.fate == ESCAPED:
        return 1
    if shot.unstable.fate == BOUNDED:
        return -1
    if shot.center.fate == BOUNDED:
        return 1
    if shot.center.fate == ESCAPED:
        return -1
    return int(np.sign(orientation * shot.gap))


def _orientation(deep: HetShot, near: HetShot, default: int) -> int:
    if deep.gap is not None and deep.gap != 0:
        return -int(np.sign(deep.gap))
    if near.gap is not None and near.gap != 0:
        return int(np.sign(near.gap))
    return default


def _bisect(
    side: Side,
    gamma: GammaVector,
    deep: float,
    near: float,
    seed: float,
    tol: float,
    cfg: IntegratorConfig,
    settings: Settings,
    orientation: Optional[int] = None,
) -> tuple[HetShot, int]:
    deep_shot = shoot_once(side, gamma, deep, seed, cfg, settings)
    near_shot = shoot_once(side, gamma, near, seed, cfg, settings)
    if orientation is None:
        orientation = _orientation(deep_shot, near_shot, default=1)
    l_deep, l_near = _label(deep_shot, orientation), _label(near_shot, orientation)
    if l_deep == 0:
        return deep_shot, orientation
    if l_near == 0:
        return near_shot, orientation
    if not (l_deep < 0 < l_near):
        raise BracketError(
            f"no sign change on sphere {side} between offsets {deep:g} ({l_deep:+d}) "
            f"and {near:g} ({l_near:+d})"
        )
    short, past = deep, near
    best = near_shot
    while abs(past - short) > tol:
        mid = 0.5 * (short + past)
        shot = shoot_once(side, gamma, mid, seed, cfg, settings)
        label = _label(shot, orientation)
        if shot.gap is not None:
            best = shot
        if label == 0:
            return shot, orientation
        if label < 0:
            short = mid
        else:
            past = mid
    final = shoot_once(side, gamma, 0.5 * (short + past), seed, cfg, settings)
    return (final if final.gap is not None else best), orientation


def _shooting_config(settings: Settings) -> IntegratorConfig:
    return IntegratorConfig.from_settings(settings).with_(
        rel_tol=settings.shooting_rel_tol, abs_tol=settings.shooting_rel_tol * 1e-2
    )


def _bisect_widening(
    side: Side, gamma: GammaVector, seed: float, tol: float, cfg: IntegratorConfig, settings: Settings
) -> tuple[HetShot, int]:
    sign = _side_sign(side)
    for attempt in Retrying(
        stop=stop_after_attempt(settings.bracket_widenings + 1),
        retry=retry_if_exception_type(BracketError),
        reraise=True,
    ):
        with attempt:
            widen = 2.0 ** (attempt.retry_state.attempt_number - 1)
            deep = sign * settings.bracket_deep * widen
            near = sign * settings.bracket_near / widen
            if attempt.retry_state.attempt_number > 1:
                logger.debug(f"Widening the {side} bracket to [{deep:g}, {near:g}]")
            return _bisect(side, gamma, deep, near, seed, tol, cfg, settings)
    raise BracketError(f"no bracket found on sphere {side}")


def _bisect_around(
    side: Side,
    gamma: GammaVector,
    offset: float,
    seed: float,
    tol: float,
    cfg: IntegratorConfig,
    settings: Settings,
    orientation: int,
) -> tuple[HetShot, int]:
    width = max(100.0 * tol, 1e-6)
    sign = _side_sign(side)
    try:
        return _bisect(
            side, gamma, offset + sign * width, offset - sign * width, seed, tol, cfg, settings, orientation
        )
    except BracketError:
        logger.debug(f"Narrow bracket lost at seed {seed:g}; restarting from the full bracket")
        return _bisect_widening(side, gamma, seed, tol, cfg, settings)


def _connection(shot: HetShot, gamma: GammaVector) -> tuple[np.ndarray, np.ndarray]:
    """Times and samples of U then C in forward time, in U's chart."""
    u, c = shot.unstable, shot.center
    t_u = u.times
    c_times = c.times[::-1]
    c_states = c.states[::-1]
    t_c = t_u[-1] + (c_times[0] - c_times)
    if shot.side == "R":
        # deltabar1 (R2, Y2) -> rbar1 (Y, D) on rho = 0
        k = gamma.k
        R2, Y2 = c_states[:, 0], c_states[:, 1]
        c_states = np.column_stack([R2 ** (-(k + 1.0)) * Y2, R2 ** (-1.0 / k)])
    return np.concatenate([t_u, t_c[1:]]), np.vstack([u.states, c_states[1:]])


def shoot_heteroclinic(
    side: Side,
    mu1: float,
    gamma: GammaVector,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> HetResult:
    """eta1 of the q_w -> q_r connection on a sphere at this mu1.

    Bisects on eta1 from the deep bracket end (far below eta^L, far above eta^R)
    to the near one, widening geometrically on failure. The result is then
    re-shot with half the seed offset until the two agree within ``tol``.

    Raises:
        BracketError: If no sign change is found after all widenings
        ConvergenceError: If the seed refinements do not settle
    """
    settings = settings or get_settings()
    tol = tol or settings.shooting_tol
    cfg = _shooting_config(settings)
    seed = settings.seed_offset
    shot, orientation = _bisect_widening(side, gamma, seed, tol, cfg, settings)

    for attempt in Retrying(
        stop=stop_after_attempt(settings.seed_refinements),
        retry=retry_if_exception_type(ConvergenceError),
        reraise=True,
    ):
        with attempt:
            half, orientation = _bisect_around(
                side, gamma, shot.offset, seed / 2, tol, cfg, settings, orientation
            )
            change = abs(half.offset - shot.offset)
            logger.debug(f"Seed {seed:g} -> {seed / 2:g}: offset moved by {change:.3e}")
            seed /= 2
            shot = half
            if change > tol:
                raise ConvergenceError(
                    f"heteroclinic on sphere {side} moved by {change:.3e} when halving the seed"
                )

    if shot.gap is None:
        raise ConvergenceError(f"the converged {side} connection does not cross the section")
    times, orbit = _connection(shot, gamma)
    result = HetResult(
        side=side,
        mu1=mu1,
        eta_het=_reference(side, gamma, mu1) + shot.offset,
        offset=shot.offset,
        gap=shot.gap,
        seed_offset=seed,
        orientation=orientation,
        chart=chart(sphere_stage(side), "ybar_neg1" if side == "L" else "rbar1"),
        times=times,
        orbit=orbit,
    )
    logger.info(f"Heteroclinic on sphere {side}: eta_het = {result.eta_het:.10g} (mu1 = {mu1:g})")
    return result


@dataclass
class HetCurve:
    mu1_grid: np.ndarray
    etaL_het: np.ndarray
    etaR_het: np.ndarray
    eta_het0_L: float
    eta_het0_R: float
    mu1_star: float

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(m), float(a), float(b))
            for m, a, b in zip(self.mu1_grid, self.etaL_het, self.etaR_het)
        ]

    def slopes(self) -> tuple[float, float]:
        """Least-squares slopes of the two curves in mu1."""
        if len(self.mu1_grid) < 2:
            return math.nan, math.nan
        return (
            float(np.polyfit(self.mu1_grid, self.etaL_het, 1)[0]),
            float(np.polyfit(self.mu1_grid, self.etaR_het, 1)[0]),
        )

    def summary(self) -> dict:
        slope_L, slope_R = self.slopes()
        return {
            "slope_L": slope_L,
            "slope_R": slope_R,
            "eta_het0_L": self.eta_het0_L,
            "eta_het0_R": self.eta_het0_R,
            "mu1_star": self.mu1_star,
        }


def build_het_curve(
    gamma: GammaVector,
    mu1_max: float,
    n: int,
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
    on_point: Optional[Callable[[float], None]] = None,
) -> HetCurve:
    """eta_Het^L and eta_Het^R over a mu1 grid, with intercepts and the crossing mu1*.

    On rho = 0 the sphere fields see eta1 only through its offset from
    eta1^{L/R}(mu1), so each side is shot once and the offset is carried
    along the grid.

    Args:
        gamma: Sphere parameters
        mu1_max: Last grid value (the grid starts at 0)
        n: Number of grid points, at least 2
        tol: Shooting tolerance
        settings: Numerical settings
        on_point: Called with each mu1 once both sides are known
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if mu1_max <= 0:
        raise ParameterError(f"mu1_max must be positive, got {mu1_max:g}")
    offset_L = shoot_heteroclinic("L", 0.0, gamma, tol, settings).offset
    offset_R = shoot_heteroclinic("R", 0.0, gamma, tol, settings).offset
    grid = np.linspace(0.0, mu1_max, n)
    left, right = [], []
    for mu1 in grid:
        left.append(gamma.etaL(float(mu1)) + offset_L)
        right.append(gamma.etaR(float(mu1)) + offset_R)
        if on_point is not None:
            on_point(float(mu1))
    return het_curve_from_table(gamma, grid, np.asarray(left), np.asarray(right))


def het_curve_from_table(gamma: GammaVector, grid, etaL, etaR) -> HetCurve:
    """Fit the affine intercepts and the crossing mu1* to tabulated heteroclinic values."""
    grid, etaL, etaR = (np.asarray(v, dtype=float) for v in (grid, etaL, etaR))
    if grid.ndim != 1 or grid.size < 2 or not grid.shape == etaL.shape == etaR.shape:
        raise ParameterError("heteroclinic table needs at least two rows of equal-length columns")
    if grid[0] < 0.0 or np.any(np.diff(grid) <= 0.0):
        raise ParameterError("mu1 grid must be nonnegative and strictly increasing")
    s = gamma.alpha + gamma.beta
    het0_L = float(np.mean(etaL - grid / gamma.alpha))
    het0_R = float(np.mean(etaR - grid / s))
    mu1_star = (het0_R - het0_L) / (1.0 / gamma.alpha - 1.0 / s)
    if mu1_star <= 0:
        logger.warning(f"Heteroclinic curves do not cross at positive mu1 (mu1* = {mu1_star:.6g})")
    logger.info(f"Heteroclinic intercepts {het0_L:.8g} / {het0_R:.8g}, mu1* = {mu1_star:.8g}")
    return HetCurve(grid, etaL, etaR, het0_L, het0_R, float(mu1_star))
