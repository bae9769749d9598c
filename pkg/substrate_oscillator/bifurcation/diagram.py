"""Grid sweeps in eta: equilibrium branch, Hopf points and the attracting cycle branch."""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from substrate_oscillator.exceptions import BranchFoldError, OscillatorError
from substrate_oscillator.model.sigmoids import SigmoidSpec
from substrate_oscillator.model.system import (
    ModelParams,
    PlanarState,
    equilibrium_eta,
    full_jacobian,
    make_full_field,
    make_full_jacobian,
)
from substrate_oscillator.numerics.equilibria import (
    EquilibriumInfo,
    detect_hopf_on_branch,
    equilibrium_info,
    find_equilibria,
)
from substrate_oscillator.numerics.geometry import polyline_crossing
from substrate_oscillator.numerics.integrate import IntegratorConfig, integrate
from substrate_oscillator.numerics.returns import LimitCycle, Section, find_limit_cycle
from substrate_oscillator.pws.singular_cycle import build_singular_cycle

logger = logging.getLogger(__name__)

SWEEP_RETURN_T_MAX = 500.0
# half-width, in units of eps, of the refined x-grid around the switching line
SWITCH_BAND = 60.0
SETTLE_T = 500.0
SETTLE_RADIUS = 1e-3


def relaxation_section(p: ModelParams) -> Section:
    """Horizontal section halfway between p^R and p^L, crossed upward left of x = 1."""
    y = 0.5 * (1.0 / p.alpha + 1.0 / (p.alpha + p.beta))
    return Section.horizontal(y, (0.0, 0.95), upward=True)


def gamma0_polyline(p: ModelParams) -> np.ndarray:
    return build_singular_cycle(p.with_(eta=1.0, mu=0.0)).polyline


def gamma0_guess(p: ModelParams, section: Section) -> np.ndarray:
    """Where the singular cycle Gamma_0 crosses the relaxation section."""
    y = section.point[1]
    return polyline_crossing(gamma0_polyline(p), y, upward=section.orientation > 0)


def _x_grid(p: ModelParams, eta_max: float) -> np.ndarray:
    x_hi = 3.0 * max(eta_max, 1.0) / min(1.0, 1.0 + min(p.mu, 0.0) / p.alpha)
    coarse = np.linspace(1e-9, x_hi, 3000)
    fine = 1.0 + p.eps * np.linspace(-SWITCH_BAND, SWITCH_BAND, 3001)
    return np.unique(np.concatenate([coarse, fine[fine > 0]]))


def equilibria_at(p: ModelParams, spec: SigmoidSpec, xs: np.ndarray) -> list[EquilibriumInfo]:
    """All equilibria at p.eta by root finding on the branch x -> eta(x)."""
    g = np.array([equilibrium_eta(p, spec, x)[0] for x in xs]) - p.eta
    roots = []
    for i in range(len(xs) - 1):
        if g[i] == 0:
            roots.append(xs[i])
        elif g[i] * g[i + 1] < 0:
            roots.append(
                brentq(lambda x: equilibrium_eta(p, spec, x)[0] - p.eta, xs[i], xs[i + 1], xtol=1e-14)
            )
    field_fn = make_full_field(p, spec)
    jacobian = make_full_jacobian(p, spec)
    return [
        equilibrium_info(field_fn, np.array([x, equilibrium_eta(p, spec, x)[1]]), jacobian) for x in roots
    ]


def hopf_points_on_graph(p: ModelParams, spec: SigmoidSpec, xs: np.ndarray, eta_range) -> list[float]:
    """eta of the Hopf points: trace zeros with det > 0 along the branch as a graph over x."""

    def trace_det(x: float) -> tuple[float, float]:
        y = equilibrium_eta(p, spec, x)[1]
        jac = full_jacobian(p, spec, PlanarState(x, y))
        return float(np.trace(jac)), float(np.linalg.det(jac))

    values = [trace_det(x) for x in xs]
    etas = []
    for i in range(len(xs) - 1):
        (ta, da), (tb, db) = values[i], values[i + 1]
        if ta * tb < 0 and da > 0 and db > 0:
            x_h = brentq(lambda x: trace_det(x)[0], xs[i], xs[i + 1], xtol=1e-14)
            eta_h = equilibrium_eta(p, spec, x_h)[0]
            if eta_range[0] <= eta_h <= eta_range[1]:
                etas.append(float(eta_h))
    return sorted(etas)


def hopf_points(
    p: ModelParams, spec: SigmoidSpec, eta_range: tuple[float, float], cfg: Optional[IntegratorConfig] = None
) -> list[float]:
    """Hopf points in eta by natural continuation, or along the x-graph past a fold."""
    cfg = cfg or IntegratorConfig.from_settings()
    lo = p.with_(eta=eta_range[0])
    xs = _x_grid(p, eta_range[1])
    start = equilibria_at(lo, spec, xs)
    if len(start) == 1:
        try:
            return detect_hopf_on_branch(
                lambda eta: make_full_field(p.with_(eta=eta), spec), eta_range, start[0].location, cfg
            )
        except BranchFoldError as e:
            logger.debug(f"{e}; using the branch as a graph over x")
    return hopf_points_on_graph(p, spec, xs, eta_range)


@dataclass
class BifurcationDiagram:
    eta_grid: np.ndarray
    equilibrium_branch: list[list[EquilibriumInfo]]
    hopf_points: list[float]
    cycle_branch: list[Optional[dict]]
    warnings: list[float] = field(default_factory=list)

    def rows(self) -> list[tuple]:
        """(eta, eq_x, eq_y, stability, cycle_max_x, cycle_l2) per equilibrium."""
        out = []
        for eta, eqs, cycle in zip(self.eta_grid, self.equilibrium_branch, self.cycle_branch):
            max_x = cycle["max_x"] if cycle else ""
            l2 = cycle["l2_norm"] if cycle else ""
            for eq in eqs:
                out.append((float(eta), float(eq.location[0]), float(eq.location[1]), eq.classification, max_x, l2))
        return out

    def summary(self) -> dict:
        found = [eta for eta, c in zip(self.eta_grid, self.cycle_branch) if c]
        return {
            "hopf_points": list(self.hopf_points),
            "cycle_eta_range": [min(found), max(found)] if found else None,
            "cycle_search_failures": list(self.warnings),
        }


def sweep_eta(
    p_base: ModelParams,
    spec: SigmoidSpec,
    eta_range: tuple[float, float],
    n: int,
    cfg: Optional[IntegratorConfig] = None,
    cycles: bool = True,
    on_step: Optional[Callable[[float], None]] = None,
) -> BifurcationDiagram:
    """Equilibria, Hopf points and attracting cycles over an eta grid.

    Cycle searches that fail where every equilibrium is unstable are recorded
    in ``warnings``; elsewhere a failed search just means no cycle.
    """
    if n < 10:
        raise ValueError(f"n must be at least 10, got {n}")
    cfg = cfg or IntegratorConfig.from_settings()
    sweep_cfg = cfg.with_(return_t_max=min(cfg.return_t_max, SWEEP_RETURN_T_MAX))
    grid = np.linspace(eta_range[0], eta_range[1], n)
    xs = _x_grid(p_base, eta_range[1])
    section = relaxation_section(p_base)
    seed_state = gamma0_guess(p_base, section)

    branch, cycle_branch, warnings = [], [], []
    for eta in grid:
        p = p_base.with_(eta=float(eta))
        eqs = equilibria_at(p, spec, xs)
        branch.append(eqs)
        cycle = None
        if cycles:
            try:
                found = find_limit_cycle(make_full_field(p, spec), seed_state, section, sweep_cfg)
                if found.stability == "attracting":
                    cycle = found.summary()
                    seed_state = section.at(found.section_coordinate)
            except OscillatorError as e:
                if all(not eq.classification.startswith("stable") for eq in eqs):
                    logger.warning(f"Cycle search failed at eta = {eta:.6g}: {e.message}")
                    warnings.append(float(eta))
        cycle_branch.append(cycle)
        if on_step is not None:
            on_step(float(eta))

    hopf = hopf_points(p_base, spec, (float(grid[0]), float(grid[-1])), cfg)
    logger.info(f"Sweep over eta in [{grid[0]:g}, {grid[-1]:g}]: Hopf points {hopf}")
    return BifurcationDiagram(grid, branch, hopf, cycle_branch, warnings)


@dataclass
class NoCycleReport:
    converged: list[bool]
    final_states: np.ndarray
    equilibria: list[EquilibriumInfo]

    @property
    def all_converged(self) -> bool:
        return all(self.converged)

    def to_record(self) -> dict:
        return {
            "all_converged": self.all_converged,
            "final_y": [float(u[1]) for u in self.final_states],
            "equilibria": [eq.to_record() for eq in self.equilibria],
        }


def no_cycle_check(
    p: ModelParams,
    spec: SigmoidSpec,
    n: int = 20,
    cfg: Optional[IntegratorConfig] = None,
    seed: int = 0,
    t_end: float = SETTLE_T,
) -> NoCycleReport:
    """Integrate n random initial states and check each ends on a stable equilibrium."""
    cfg = cfg or IntegratorConfig.from_settings()
    field_fn = make_full_field(p, spec)
    y_max = 1.5 / p.alpha
    box = ((0.0, 3.0), (0.0, y_max))
    stable = [
        eq
        for eq in find_equilibria(field_fn, box, cfg, make_full_jacobian(p, spec))
        if eq.classification.startswith("stable")
    ]
    rng = np.random.default_rng(seed)
    converged, finals = [], []
    for _ in range(n):
        start = np.array([rng.uniform(0.0, 3.0), rng.uniform(0.0, y_max)])
        final = integrate(field_fn, start, (0.0, t_end), cfg, dense=False).final_state
        finals.append(final)
        converged.append(any(np.linalg.norm(final - eq.location) < SETTLE_RADIUS for eq in stable))
    logger.info(f"{sum(converged)}/{n} random states settled on {len(stable)} stable equilibria")
    return NoCycleReport(converged, np.asarray(finals), stable)


def _distinct(cycle: LimitCycle, others: list[LimitCycle]) -> bool:
    return all(
        abs(cycle.period - c.period) > 1e-4 * c.period or abs(cycle.max_x - c.max_x) > 1e-4 for c in others
    )


def find_coexisting_cycles(
    p: ModelParams,
    spec: SigmoidSpec,
    cfg: Optional[IntegratorConfig] = None,
    n_starts: int = 10,
    seed: int = 0,
    t_settle: float = SETTLE_T,
) -> list[LimitCycle]:
    """Attracting cycles from random forward starts, repelling ones around stable equilibria.

    A repelling cycle is looked for by flowing backwards from a kick off each
    stable equilibrium; an attracting one by flowing forwards from random
    states that do not settle on an equilibrium.
    """
    cfg = cfg or IntegratorConfig.from_settings()
    field_fn = make_full_field(p, spec)
    backward = lambda t, u: -field_fn(t, u)  # noqa: E731
    y_max = 1.5 / p.alpha
    equilibria = find_equilibria(field_fn, ((0.0, 3.0), (0.0, y_max)), cfg, make_full_jacobian(p, spec))
    stable = [eq for eq in equilibria if eq.classification.startswith("stable")]
    cycles: list[LimitCycle] = []

    def settled(u: np.ndarray) -> bool:
        return any(np.linalg.norm(u - eq.location) < SETTLE_RADIUS for eq in equilibria)

    for eq in stable:
        start = eq.location + np.array([1e-3, 0.0])
        traj = integrate(backward, start, (0.0, t_settle), cfg, dense=False)
        guess = traj.final_state
        if settled(guess) or not np.all(np.isfinite(guess)):
            continue
        section = Section.through(guess, backward(0.0, guess), halfwidth=0.5)
        try:
            cycle = find_limit_cycle(field_fn, guess, section, cfg, reverse_time=True)
        except OscillatorError as e:
            logger.warning(f"Repelling cycle search near {eq.location} failed: {e.message}")
            continue
        if _distinct(cycle, cycles):
            cycles.append(cycle)

    rng = np.random.default_rng(seed)
    for _ in range(n_starts):
        start = np.array([rng.uniform(0.0, 3.0), rng.uniform(0.0, y_max)])
        guess = integrate(field_fn, start, (0.0, t_settle), cfg, dense=False).final_state
        if settled(guess):
            continue
        section = Section.through(guess, field_fn(0.0, guess), halfwidth=0.5)
        try:
            cycle = find_limit_cycle(field_fn, guess, section, cfg)
        except OscillatorError as e:
            logger.debug(f"Forward cycle search from {start} failed: {e.message}")
            continue
        if _distinct(cycle, cycles):
            cycles.append(cycle)

    cycles.sort(key=lambda c: (c.stability, c.max_x))
    logger.info(
        f"Found {len(cycles)} cycles: "
        + ", ".join(f"{c.stability} (max x {c.max_x:.4g})" for c in cycles)
    )
    return cycles
