"""Adaptive integration with an implicit fallback for stiff stretches."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp

from substrate_oscillator.config.settings import Settings, get_settings
from substrate_oscillator.exceptions import IntegrationError

logger = logging.getLogger(__name__)

IvpField = Callable[[float, np.ndarray], np.ndarray]

EXPLICIT_METHOD = "RK45"
IMPLICIT_METHOD = "Radau"


class IntegratorConfig(BaseModel):
    """Tolerances and budgets shared by every numerical routine."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-9, gt=0)
    abs_tol: float = Field(default=1e-11, gt=0)
    max_step: float = Field(default=math.inf, gt=0)
    stiff_switch: bool = True
    nfev_budget: int = Field(default=400_000, ge=1)
    return_t_max: float = Field(default=1e4, gt=0)
    cycle_tol: float = Field(default=1e-8, gt=0)
    cycle_max_iter: int = Field(default=40, ge=1)
    multiplier_step: float = Field(default=1e-6, gt=0)
    equilibrium_grid: int = Field(default=20, ge=2)
    dedup_radius: float = Field(default=1e-6, gt=0)
    newton_tol: float = Field(default=1e-10, gt=0)

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "IntegratorConfig":
        """Build the config from the global settings (environment and .env)."""
        settings = settings or get_settings()
        return cls(**{name: getattr(settings, name) for name in cls.model_fields})

    def with_(self, **changes) -> "IntegratorConfig":
        return self.model_copy(update=changes)


@dataclass
class Trajectory:
    """Solution of one integration; ``sol`` is the dense interpolant when available."""

    t: np.ndarray
    states: np.ndarray
    method: str
    nfev: int
    sol: Optional[Callable[[float], np.ndarray]] = None
    t_events: list[np.ndarray] = field(default_factory=list)
    y_events: list[np.ndarray] = field(default_factory=list)
    terminated: bool = False

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.t[-1])

    def rows(self) -> list[tuple]:
        """(t, x, y) rows for CSV export."""
        return [(float(t), *map(float, u)) for t, u in zip(self.t, self.states)]


class _BudgetExceeded(Exception):
    pass


class _CountingField:
    """Wraps a field, counting evaluations and aborting past a budget."""

    def __init__(self, field: IvpField, budget: Optional[int] = None):
        self.field = field
        self.budget = budget
        self.nfev = 0

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        self.nfev += 1
        if self.budget is not None and self.nfev > self.budget:
            raise _BudgetExceeded
        return self.field(t, u)


def _solve(
    field: IvpField,
    t_span: tuple[float, float],
    state: np.ndarray,
    cfg: IntegratorConfig,
    method: str,
    budget: Optional[int],
    events: Optional[Sequence[Callable]],
    t_eval: Optional[np.ndarray],
    dense: bool,
):
    counted = _CountingField(field, budget)
    result = solve_ivp(
        counted,
        t_span,
        state,
        method=method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        events=events,
        t_eval=t_eval,
        dense_output=dense,
    )
    return result, counted.nfev


def integrate(
    field: IvpField,
    state: Sequence[float],
    t_span: tuple[float, float],
    cfg: Optional[IntegratorConfig] = None,
    events: Optional[Sequence[Callable]] = None,
    t_eval: Optional[np.ndarray] = None,
    dense: bool = True,
    method: Optional[str] = None,
) -> Trajectory:
    """Integrate ``field`` from ``state`` over ``t_span``.

    RK45 with dense output first. When the explicit method fails, or spends more
    than ``nfev_budget`` evaluations, the whole span is redone with Radau if
    ``stiff_switch`` is on.

    Args:
        field: Right-hand side ``f(t, u)``
        state: Initial state
        t_span: (t0, t1); t1 < t0 integrates backwards
        cfg: Integrator configuration (defaults from settings)
        events: Event functions in the ``solve_ivp`` convention
        t_eval: Optional output times
        dense: Keep the dense interpolant
        method: Force one solve_ivp method (no fallback)

    Returns:
        Trajectory

    Raises:
        IntegrationError: If the step size collapses
    """
    cfg = cfg or IntegratorConfig.from_settings()
    u0 = np.asarray(state, dtype=float)
    if method is not None:
        result, nfev = _solve(field, t_span, u0, cfg, method, None, events, t_eval, dense)
        if result.status == -1:
            raise IntegrationError(f"{method} failed on {t_span}: {result.message}")
        return _trajectory(result, method, nfev)

    budget = cfg.nfev_budget if cfg.stiff_switch else None
    method = EXPLICIT_METHOD
    try:
        result, nfev = _solve(field, t_span, u0, cfg, method, budget, events, t_eval, dense)
        failed = result.status == -1
        reason = result.message
    except _BudgetExceeded:
        failed, reason, nfev = True, f"more than {cfg.nfev_budget} evaluations", cfg.nfev_budget

    if failed:
        if not cfg.stiff_switch:
            raise IntegrationError(
                f"{EXPLICIT_METHOD} failed on {t_span}: {reason} (consider enabling stiff_switch)"
            )
        logger.debug(f"{EXPLICIT_METHOD} gave up ({reason}); switching to {IMPLICIT_METHOD}")
        method = IMPLICIT_METHOD
        result, nfev = _solve(field, t_span, u0, cfg, method, None, events, t_eval, dense)
        if result.status == -1:
            raise IntegrationError(f"{IMPLICIT_METHOD} failed on {t_span}: {result.message}")
    return _trajectory(result, method, nfev)


def _trajectory(result, method: str, nfev: int) -> Trajectory:
    return Trajectory(
        t=result.t,
        states=result.y.T,
        method=method,
        nfev=nfev,
        sol=result.sol,
        t_events=list(result.t_events or []),
        y_events=list(result.y_events or []),
        terminated=result.status == 1,
    )


def negated(field: IvpField) -> IvpField:
    """The time-reversed field -f."""

    def reversed_field(t: float, u: np.ndarray) -> np.ndarray:
        return -np.asarray(field(t, u))

    return reversed_field
