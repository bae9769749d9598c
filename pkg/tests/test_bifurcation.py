"""Tests for eta sweeps, Hopf points, cycle searches and regime verdicts."""

import numpy as np
import pytest

from substrate_oscillator.bifurcation.diagram import (
    equilibria_at,
    find_coexisting_cycles,
    gamma0_guess,
    gamma0_polyline,
    hopf_points,
    no_cycle_check,
    relaxation_section,
    sweep_eta,
)
from substrate_oscillator.bifurcation.regime import (
    NONE_NEAR_GAMMA0,
    RELAXATION_EXISTS,
    classify_regime,
    het_values,
    mu_negative_scenario,
    predict_regime,
)
from substrate_oscillator.exceptions import ParameterError
from substrate_oscillator.model.sigmoids import hill_sigmoid
from substrate_oscillator.model.system import make_full_field
from substrate_oscillator.numerics.geometry import hausdorff_distance
from substrate_oscillator.numerics.integrate import IntegratorConfig
from substrate_oscillator.numerics.returns import find_limit_cycle
from substrate_oscillator.sphere.shooting import HetCurve


@pytest.fixture
def het(gamma) -> HetCurve:
    grid = np.array([0.0, 1.0])
    s = gamma.alpha + gamma.beta
    return HetCurve(
        mu1_grid=grid,
        etaL_het=-0.3 + grid / gamma.alpha,
        etaR_het=0.8 + grid / s,
        eta_het0_L=-0.3,
        eta_het0_R=0.8,
        mu1_star=1.1 / (1.0 / gamma.alpha - 1.0 / s),
    )


class TestSections:
    def test_relaxation_section_and_guess(self, reference_params):
        section = relaxation_section(reference_params)
        assert section.point[1] == pytest.approx(1.2)
        guess = gamma0_guess(reference_params, section)
        assert guess[1] == pytest.approx(1.2)
        assert 0.0 < guess[0] < 0.95

    def test_equilibria_on_branch(self, reference_params, arctan):
        xs = np.linspace(1e-9, 3.0, 3000)
        eqs = equilibria_at(reference_params.with_(eta=0.9), arctan, xs)
        assert len(eqs) == 1
        assert eqs[0].residual < 1e-10


class TestHopfPoints:
    def test_reference_hopf_points(self, reference_params, arctan):
        points = hopf_points(reference_params, arctan, (0.9, 1.05))
        assert len(points) == 2
        assert points[0] == pytest.approx(0.93, abs=0.01)
        assert points[1] == pytest.approx(1.02, abs=0.01)

    def test_sweep_needs_ten_points(self, reference_params, arctan):
        with pytest.raises(ValueError):
            sweep_eta(reference_params, arctan, (0.9, 1.05), n=5)


class TestPrediction:
    def test_inside_the_wedge(self, het):
        assert predict_regime(0.2, 0.5, het, 1e-8) == (RELAXATION_EXISTS, False)

    def test_outside_the_wedge(self, het):
        assert predict_regime(0.2, 1.5, het, 1e-8)[0] == NONE_NEAR_GAMMA0
        assert predict_regime(0.9, 1.5, het, 1e-8)[0] == NONE_NEAR_GAMMA0

    def test_inconclusive_near_boundary(self, het):
        etaL, _ = het_values(het, 0.2)
        assert predict_regime(0.2, etaL + 1e-9, het, 1e-8)[1]

    def test_mu1_outside_table(self, het):
        with pytest.raises(ParameterError):
            het_values(het, 1.5)

    def test_sigmoid_must_match_gamma(self, gamma, het):
        with pytest.raises(ParameterError):
            classify_regime(0.0064, 0.2, 0.5, gamma, het, spec=hill_sigmoid(2))

    def test_negative_mu_scenario_preconditions(self, reference_params, arctan):
        with pytest.raises(ParameterError):
            mu_negative_scenario(reference_params, arctan)
        with pytest.raises(ParameterError):
            mu_negative_scenario(reference_params.with_(mu=-0.05, eta=0.99), arctan)


@pytest.mark.slow
class TestCycles:
    def test_relaxation_cycle(self, reference_params, arctan):
        section = relaxation_section(reference_params)
        cycle = find_limit_cycle(
            make_full_field(reference_params, arctan), gamma0_guess(reference_params, section), section
        )
        assert 1.5 <= cycle.max_x <= 1.9
        assert abs(cycle.multiplier) < 1.0
        assert cycle.stability == "attracting"

    def test_cycles_approach_gamma0(self, reference_params, arctan):
        distances, periods = [], []
        for eps in (1e-2, 1e-3, 1e-4):
            p = reference_params.with_(eps=eps)
            section = relaxation_section(p)
            cycle = find_limit_cycle(make_full_field(p, arctan), gamma0_guess(p, section), section)
            distances.append(hausdorff_distance(cycle.samples, gamma0_polyline(p), n=1000))
            periods.append(cycle.period)
        assert distances[0] > distances[1] > distances[2]
        assert periods[0] < periods[1] < periods[2]

    @pytest.mark.parametrize("eta", [1.0597, 1.0604])
    def test_no_cycle_past_the_canard(self, reference_params, arctan, eta):
        report = no_cycle_check(reference_params.with_(mu=0.08, eta=eta), arctan, n=20)
        assert report.all_converged
        for y in report.final_states[:, 1]:
            assert min(abs(y - 1.6), abs(y - 0.4)) < 0.1

    def test_three_coexisting_cycles(self, reference_params, arctan):
        p = reference_params.with_(mu=0.07936, eta=1.05940)
        cycles = find_coexisting_cycles(p, arctan, IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12))
        assert len(cycles) == 3
        assert {c.stability for c in cycles} == {"attracting", "repelling"}

    def test_negative_mu_scenario(self, reference_params, arctan):
        report = mu_negative_scenario(reference_params.with_(mu=-0.05, eta=0.94), arctan)
        assert report.regular_crossing
        assert report.all_attracting
        assert report.shrinking

    def test_sweep_finds_cycle_branch(self, reference_params, arctan):
        diagram = sweep_eta(reference_params, arctan, (0.9, 1.05), n=10, cycles=True)
        assert len(diagram.hopf_points) == 2
        assert diagram.summary()["cycle_eta_range"] is not None
