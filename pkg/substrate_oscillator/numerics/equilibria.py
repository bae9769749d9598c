"""Equilibria of planar fields: multi-start root finding, classification, Hopf detection."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, root

from substrate_oscillator.exceptions import BranchFoldError
from substrate_oscillator.numerics.integrate import IntegratorConfig, IvpField

logger = logging.getLogger(__name__)

FD_STEP = 1e-6
EIGEN_ATOL = 1e-9

Box = tuple[tuple[float, float], tuple[float, float]]


@dataclass
class EquilibriumInfo:
    location: np.ndarray
    jacobian: np.ndarray
    eigenvalues: np.ndarray
    classification: str
    residual: float = 0.0

    def to_record(self) -> dict:
        return {
            "location": [float(v) for v in self.location],
            "eigenvalues": [[float(v.real), float(v.imag)] for v in self.eigenvalues],
            "classification": self.classification,
        }


def jacobian_fd(field: IvpField, u, step: float = FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian with step ``step * max(1, |u_i|)``."""
    u = np.asarray(u, dtype=float)
    n = len(u)
    jac = np.empty((n, n))
    for i in range(n):
        h = step * max(1.0, abs(u[i]))
        e = np.zeros(n)
        e[i] = h
        jac[:, i] = (np.asarray(field(0.0, u + e)) - np.asarray(field(0.0, u - e))) / (2.0 * h)
    return jac


def classify_eigenvalues(eigenvalues: Sequence[complex], atol: float = EIGEN_ATOL) -> str:
    """saddle, stable/unstable node or focus, or nonhyperbolic."""
    eig = np.asarray(eigenvalues, dtype=complex)
    real = eig.real
    if np.any(np.abs(real) < atol):
        return "nonhyperbolic"
    if np.any(real > 0) and np.any(real < 0):
        return "saddle"
    kind = "focus" if np.any(np.abs(eig.imag) > atol) else "node"
    return f"stable_{kind}" if np.all(real < 0) else f"unstable_{kind}"


def equilibrium_info(
    field: IvpField, u, jacobian: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
) -> EquilibriumInfo:
    u = np.asarray(u, dtype=float)
    jac = jacobian(0.0, u) if jacobian is not None else jacobian_fd(field, u)
    eigenvalues = np.linalg.eigvals(jac)
    return EquilibriumInfo(
        location=u,
        jacobian=jac,
        eigenvalues=eigenvalues,
        classification=classify_eigenvalues(eigenvalues),
        residual=float(np.max(np.abs(field(0.0, u)))),
    )


def _newton_polish(
    field: IvpField, u: np.ndarray, tol: float, jacobian=None, max_steps: int = 8
) -> np.ndarray:
    for _ in range(max_steps):
        value = np.asarray(field(0.0, u))
        if np.max(np.abs(value)) < tol:
            break
        jac = jacobian(0.0, u) if jacobian is not None else jacobian_fd(field, u)
        try:
            u = u - np.linalg.solve(jac, value)
        except np.linalg.LinAlgError:
            break
    return u


def find_equilibria(
    field: IvpField,
    box: Box,
    cfg: Optional[IntegratorConfig] = None,
    jacobian: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
) -> list[EquilibriumInfo]:
    """All equilibria found from a grid of starts inside ``box``, sorted by location.

    Args:
        field: Planar field ``f(t, u)``
        box: ((x_min, x_max), (y_min, y_max))
        cfg: Grid size, merge radius and residual tolerance
        jacobian: Optional analytic Jacobian ``J(t, u)``

    Returns:
        Deduplicated equilibria with residual below ``newton_tol``; may be empty
    """
    cfg = cfg or IntegratorConfig.from_settings()
    (x_lo, x_hi), (y_lo, y_hi) = box
    n = cfg.equilibrium_grid
    found: list[np.ndarray] = []

    def fun(u):
        return np.asarray(field(0.0, u))

    jac = (lambda u: jacobian(0.0, u)) if jacobian is not None else None
    margin_x = 1e-6 * max(1.0, x_hi - x_lo)
    margin_y = 1e-6 * max(1.0, y_hi - y_lo)
    for x0 in np.linspace(x_lo, x_hi, n):
        for y0 in np.linspace(y_lo, y_hi, n):
            sol = root(fun, np.array([x0, y0]), jac=jac, method="hybr")
            u = _newton_polish(field, sol.x, cfg.newton_tol, jacobian)
            if not np.all(np.isfinite(u)) or np.max(np.abs(fun(u))) >= cfg.newton_tol:
                continue
            if not (x_lo - margin_x <= u[0] <= x_hi + margin_x and y_lo - margin_y <= u[1] <= y_hi + margin_y):
                continue
            if any(np.linalg.norm(u - v) < cfg.dedup_radius for v in found):
                continue
            found.append(u)
    found.sort(key=lambda v: (v[0], v[1]))
    logger.debug(f"Found {len(found)} equilibria in {box}")
    return [equilibrium_info(field, u, jacobian) for u in found]


def _continue_equilibrium(
    family: Callable[[float], IvpField], eta: float, guess: np.ndarray, tol: float
) -> np.ndarray:
    field = family(eta)
    sol = root(lambda u: np.asarray(field(0.0, u)), guess, method="hybr")
    u = _newton_polish(field, sol.x, tol)
    if not np.all(np.isfinite(u)) or np.max(np.abs(field(0.0, u))) >= tol:
        raise BranchFoldError(f"equilibrium continuation failed at eta={eta:.10g}")
    return u


def detect_hopf_on_branch(
    family: Callable[[float], IvpField],
    eta_range: tuple[float, float],
    start: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    n: int = 200,
) -> list[float]:
    """eta values where the continued equilibrium's trace changes sign with det > 0.

    The branch is followed by natural-parameter Newton continuation from ``start``
    (an equilibrium guess at ``eta_range[0]``); each sign change is refined with
    brentq on the trace.

    Raises:
        BranchFoldError: If Newton continuation loses the branch (e.g. at a fold)
    """
    cfg = cfg or IntegratorConfig.from_settings()
    etas = np.linspace(eta_range[0], eta_range[1], n)
    u = _continue_equilibrium(family, etas[0], np.asarray(start, dtype=float), cfg.newton_tol)
    branch = [u]
    for eta in etas[1:]:
        u = _continue_equilibrium(family, eta, u, cfg.newton_tol)
        branch.append(u)

    def trace_det(eta: float, guess: np.ndarray) -> tuple[float, float, np.ndarray]:
        v = _continue_equilibrium(family, eta, guess, cfg.newton_tol)
        jac = jacobian_fd(family(eta), v)
        return float(np.trace(jac)), float(np.linalg.det(jac)), v

    values = [trace_det(eta, v) for eta, v in zip(etas, branch)]
    hopf = []
    for i in range(len(etas) - 1):
        (tr_a, det_a, u_a), (tr_b, det_b, _) = values[i], values[i + 1]
        if tr_a * tr_b < 0 and det_a > 0 and det_b > 0:
            eta_h = brentq(lambda e: trace_det(e, u_a)[0], etas[i], etas[i + 1], xtol=1e-12)
            logger.info(f"Hopf point at eta = {eta_h:.10g}")
            hopf.append(float(eta_h))
    return hopf
