"""Existence verdicts for relaxation oscillations, predicted from the heteroclinic curves and observed numerically."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from substrate_oscillator.bifurcation.diagram import gamma0_guess, gamma0_polyline, relaxation_section
from substrate_oscillator.blowup.charts import scale_params
from substrate_oscillator.config.settings import Settings, get_settings
from substrate_oscillator.exceptions import OscillatorError, ParameterError
from substrate_oscillator.model.blended import substrate_depletion_blend
from substrate_oscillator.model.sigmoids import SigmoidSpec, arctan_sigmoid
from substrate_oscillator.model.system import GammaVector, ModelParams, make_full_field
from substrate_oscillator.numerics.geometry import hausdorff_distance
from substrate_oscillator.numerics.integrate import IntegratorConfig
from substrate_oscillator.numerics.returns import Section, find_limit_cycle
from substrate_oscillator.pws.singular_cycle import (
    crossing_cycle,
    generic_singular_cycle,
    is_regular_crossing,
)
from substrate_oscillator.sphere.shooting import HetCurve

logger = logging.getLogger(__name__)

RELAXATION_EXISTS = "relaxation_exists"
NONE_NEAR_GAMMA0 = "none_near_gamma0"
GAMMA_RTOL = 1e-12


@dataclass
class RegimeVerdict:
    eps: float
    mu1: float
    eta1: float
    gamma: GammaVector
    predicted: str
    observed: str
    inconclusive: bool = False
    hausdorff: Optional[float] = None
    cycle: Optional[dict] = None
    notes: list[str] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.predicted == self.observed

    def to_record(self) -> dict:
        return {
            "eps": self.eps,
            "mu1": self.mu1,
            "eta1": self.eta1,
            "gamma": self.gamma.model_dump(),
            "predicted": self.predicted,
            "observed": self.observed,
            "agree": self.agree,
            "inconclusive": self.inconclusive,
            "hausdorff": self.hausdorff,
            "cycle": self.cycle,
            "notes": list(self.notes),
        }


def het_values(het: HetCurve, mu1: float) -> tuple[float, float]:
    """(eta_Het^L, eta_Het^R) at mu1, interpolated in the table.

    Raises:
        ParameterError: If mu1 lies outside the tabulated range
    """
    grid = np.asarray(het.mu1_grid, dtype=float)
    if not grid[0] - 1e-12 <= mu1 <= grid[-1] + 1e-12:
        raise ParameterError(f"mu1 = {mu1:g} outside the heteroclinic table [{grid[0]:g}, {grid[-1]:g}]")
    return float(np.interp(mu1, grid, het.etaL_het)), float(np.interp(mu1, grid, het.etaR_het))


def predict_regime(mu1: float, eta1: float, het: HetCurve, tol: float) -> tuple[str, bool]:
    """Predicted regime and whether eta1 is within 2 tol of a heteroclinic boundary."""
    etaL_het, etaR_het = het_values(het, mu1)
    exists = mu1 < het.mu1_star and etaL_het < eta1 < etaR_het
    inconclusive = min(abs(eta1 - etaL_het), abs(eta1 - etaR_het)) < 2.0 * tol
    return (RELAXATION_EXISTS if exists else NONE_NEAR_GAMMA0), inconclusive


def _check_spec(gamma: GammaVector, spec: SigmoidSpec) -> None:
    matches = (
        spec.k == gamma.k
        and spec.phiL0 is not None
        and spec.phiR0 is not None
        and math.isclose(spec.phiL0, gamma.phiL0, rel_tol=GAMMA_RTOL)
        and math.isclose(spec.phiR0, gamma.phiR0, rel_tol=GAMMA_RTOL)
    )
    if not matches:
        raise ParameterError(f"sigmoid {spec.label} does not have the tail data of {gamma}")


def classify_regime(
    eps: float,
    mu1: float,
    eta1: float,
    gamma: GammaVector,
    het: HetCurve,
    spec: Optional[SigmoidSpec] = None,
    cfg: Optional[IntegratorConfig] = None,
    settings: Optional[Settings] = None,
) -> RegimeVerdict:
    """Predicted and observed existence of a relaxation cycle near Gamma_0.

    The prediction is "exists" iff mu1 < mu1* and eta_Het^L(mu1) < eta1 <
    eta_Het^R(mu1). The observation runs the cycle search from Gamma_0's
    crossing of the relaxation section and accepts an attracting cycle within
    ``near_tube_radius`` of Gamma_0 in Hausdorff distance.
    """
    settings = settings or get_settings()
    cfg = cfg or IntegratorConfig.from_settings(settings)
    spec = spec or arctan_sigmoid()
    _check_spec(gamma, spec)

    predicted, inconclusive = predict_regime(mu1, eta1, het, settings.shooting_tol)
    eps, mu, eta = scale_params(eps, mu1, eta1, gamma.k)
    p = ModelParams(alpha=gamma.alpha, beta=gamma.beta, eta=eta, mu=mu, eps=eps)
    section = relaxation_section(p)
    verdict = RegimeVerdict(eps, mu1, eta1, gamma, predicted, NONE_NEAR_GAMMA0, inconclusive)
    try:
        cycle = find_limit_cycle(make_full_field(p, spec), gamma0_guess(p, section), section, cfg)
    except OscillatorError as e:
        verdict.notes.append(f"cycle search: {e.message}")
        cycle = None

    if cycle is not None:
        distance = hausdorff_distance(cycle.samples, gamma0_polyline(p), n=settings.hausdorff_samples)
        verdict.hausdorff = distance
        verdict.cycle = cycle.summary()
        if cycle.stability == "attracting" and distance <= settings.near_tube_radius:
            verdict.observed = RELAXATION_EXISTS
        else:
            verdict.notes.append(f"{cycle.stability} cycle at Hausdorff distance {distance:.4g}")

    if verdict.inconclusive:
        logger.warning(f"Inconclusive cell mu1={mu1:g}, eta1={eta1:g}: too close to a heteroclinic value")
    elif not verdict.agree:
        logger.warning(f"Prediction {predicted} but observed {verdict.observed} at mu1={mu1:g}, eta1={eta1:g}")
    logger.info(f"Regime at eps={eps:g}, mu1={mu1:g}, eta1={eta1:g}: {verdict.observed}")
    return verdict


@dataclass
class NegativeMuScenario:
    eta: float
    etaL: float
    etaR: float
    crossing_point: tuple[float, float]
    regular_crossing: bool
    eps_values: list[float]
    cycles: list[Optional[dict]]
    distances: list[Optional[float]]
    generic_distances: list[Optional[float]]

    @property
    def all_attracting(self) -> bool:
        return all(c is not None and c["stability"] == "attracting" for c in self.cycles)

    @property
    def shrinking(self) -> bool:
        """Distance to the PWL crossing cycle decreases as eps decreases."""
        if any(d is None for d in self.distances):
            return False
        order = np.argsort(self.eps_values)[::-1]
        ordered = [self.distances[i] for i in order]
        return all(b < a for a, b in zip(ordered, ordered[1:]))

    def to_record(self) -> dict:
        return {
            "eta": self.eta,
            "etaL": self.etaL,
            "etaR": self.etaR,
            "crossing_point": list(self.crossing_point),
            "regular_crossing": self.regular_crossing,
            "eps_values": list(self.eps_values),
            "cycles": self.cycles,
            "hausdorff": self.distances,
            "hausdorff_generic": self.generic_distances,
            "all_attracting": self.all_attracting,
            "shrinking": self.shrinking,
        }


def mu_negative_scenario(
    p: ModelParams,
    spec: SigmoidSpec,
    cfg: Optional[IntegratorConfig] = None,
    eps_values: Sequence[float] = (1e-2, 1e-3),
    settings: Optional[Settings] = None,
) -> NegativeMuScenario:
    """Attracting cycles of the blended system for mu < 0 and their singular limits.

    The blended field is simulated at each eps in ``eps_values``; each cycle is
    compared with the crossing cycle of the PWL limit at the same eta and with
    the generic singular cycle through the regular crossing point at eta^L(mu).

    Raises:
        ParameterError: If mu >= 0 or eta is not in (eta^L(mu), eta^R(mu))
    """
    settings = settings or get_settings()
    cfg = cfg or IntegratorConfig.from_settings(settings)
    if p.mu >= 0:
        raise ParameterError(f"the negative-mu scenario needs mu < 0, got {p.mu:g}")
    etaL, etaR = 1.0 + p.mu / p.alpha, 1.0 + p.mu / (p.alpha + p.beta)
    if not etaL < p.eta < etaR:
        raise ParameterError(f"eta = {p.eta:g} outside ({etaL:g}, {etaR:g})")

    generic = generic_singular_cycle(p)
    q = np.asarray(generic.crossing_point)
    regular = is_regular_crossing(p.with_(eta=etaL), q)
    reference = crossing_cycle(p)
    polyline = reference.polyline
    y_lo, y_hi = float(polyline[:, 1].min()), float(polyline[:, 1].max())
    pad = 0.5 * (y_hi - y_lo)
    section = Section.vertical(1.0, (y_lo - pad, y_hi + pad), rightward=True)
    guess = reference.gammaL[-1]

    cycles, distances, generic_distances = [], [], []
    for eps in eps_values:
        field_fn = substrate_depletion_blend(p.with_(eps=eps), spec).as_field()
        try:
            cycle = find_limit_cycle(field_fn, guess, section, cfg)
        except OscillatorError as e:
            logger.warning(f"No cycle of the blended system at eps = {eps:g}: {e.message}")
            cycles.append(None)
            distances.append(None)
            generic_distances.append(None)
            continue
        cycles.append(cycle.summary())
        distances.append(hausdorff_distance(cycle.samples, polyline, n=settings.hausdorff_samples))
        generic_distances.append(
            hausdorff_distance(cycle.samples, generic.polyline, n=settings.hausdorff_samples)
        )
        guess = section.at(cycle.section_coordinate)

    report = NegativeMuScenario(
        eta=p.eta,
        etaL=etaL,
        etaR=etaR,
        crossing_point=(float(q[0]), float(q[1])),
        regular_crossing=regular,
        eps_values=[float(e) for e in eps_values],
        cycles=cycles,
        distances=distances,
        generic_distances=generic_distances,
    )
    logger.info(
        f"mu = {p.mu:g}, eta = {p.eta:g}: attracting cycles {report.all_attracting}, "
        f"distances {distances}"
    )
    return report
