"""Tests for heteroclinic shooting, the Melnikov sign and the left/right duality."""

from types import SimpleNamespace

import numpy as np
import pytest

from substrate_oscillator.blowup.charts import ScaledParams
from substrate_oscillator.config.settings import Settings
from substrate_oscillator.exceptions import NonMonotoneOrbitError, ParameterError
from substrate_oscillator.sphere import shooting
from substrate_oscillator.sphere.duality import het_hopf_ordering, right_het_via_left
from substrate_oscillator.sphere.melnikov import is_monotone_connection, melnikov_check
from substrate_oscillator.sphere.shooting import build_het_curve, het_curve_from_table, shoot_heteroclinic

TOL = 1e-6


@pytest.fixture
def shooting_settings() -> Settings:
    return Settings(shooting_tol=TOL, shooting_rel_tol=1e-9)


class TestHetTable:
    def test_affine_table(self, gamma):
        grid = np.linspace(0.0, 1.0, 5)
        s = gamma.alpha + gamma.beta
        curve = het_curve_from_table(gamma, grid, -0.3 + grid / gamma.alpha, 0.8 + grid / s)
        assert curve.eta_het0_L == pytest.approx(-0.3)
        assert curve.eta_het0_R == pytest.approx(0.8)
        assert curve.mu1_star == pytest.approx(1.1 / (2.0 - 1.0 / 1.5))
        slope_L, slope_R = curve.slopes()
        assert slope_L == pytest.approx(1.0 / gamma.alpha)
        assert slope_R == pytest.approx(1.0 / s)
        assert curve.rows()[0] == (0.0, -0.3, 0.8)

    def test_summary_keys(self, gamma):
        curve = het_curve_from_table(gamma, [0.0, 1.0], [-0.2, 1.8], [0.5, 1.2])
        assert set(curve.summary()) == {"slope_L", "slope_R", "eta_het0_L", "eta_het0_R", "mu1_star"}

    @pytest.mark.parametrize(
        "grid, etaL, etaR",
        [
            ([0.0, 1.0, 0.5], [-0.3, 1.7, 0.7], [0.8, 1.2, 1.0]),
            ([-0.5, 0.5], [-1.3, 0.7], [0.5, 1.1]),
            ([0.0, 1.0], [-0.3, 1.7, 0.0], [0.8, 1.2]),
            ([0.0], [-0.3], [0.8]),
        ],
        ids=["unsorted", "negative", "ragged", "single"],
    )
    def test_table_rejected(self, gamma, grid, etaL, etaR):
        with pytest.raises(ParameterError):
            het_curve_from_table(gamma, grid, etaL, etaR)

    def test_grid_needs_two_points(self, gamma):
        with pytest.raises(ValueError):
            build_het_curve(gamma, 1.0, 1)

    def test_curve_reuses_one_offset_per_side(self, gamma, monkeypatch):
        calls = []

        def fake_shot(side, mu1, gamma, tol=None, settings=None):
            calls.append((side, mu1))
            return SimpleNamespace(offset=-0.3 if side == "L" else 0.8)

        monkeypatch.setattr(shooting, "shoot_heteroclinic", fake_shot)
        visited = []
        curve = build_het_curve(gamma, 1.0, 5, on_point=visited.append)
        assert sorted(calls) == [("L", 0.0), ("R", 0.0)]
        assert visited == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        assert curve.etaL_het == pytest.approx(-0.3 + curve.mu1_grid / gamma.alpha)
        assert curve.etaR_het == pytest.approx(0.8 + curve.mu1_grid / (gamma.alpha + gamma.beta))
        assert curve.mu1_star == pytest.approx(1.1 / (2.0 - 1.0 / 1.5))

    def test_curve_needs_positive_range(self, gamma):
        with pytest.raises(ParameterError):
            build_het_curve(gamma, 0.0, 3)


class TestMonotone:
    def test_monotone_connection(self):
        orbit = np.column_stack([np.linspace(1.0, 0.1, 20), np.linspace(0.0, 0.9, 20)])
        assert is_monotone_connection(orbit)
        assert not is_monotone_connection(orbit[::-1])

    def test_melnikov_rejects_non_monotone(self, gamma):
        orbit = np.column_stack([np.linspace(0.1, 1.0, 20), np.linspace(0.0, 0.9, 20)])
        with pytest.raises(NonMonotoneOrbitError):
            melnikov_check(orbit, ScaledParams(eta1=-0.5), gamma)


@pytest.mark.slow
class TestShooting:
    def test_intercept_signs(self, gamma, shooting_settings):
        left = shoot_heteroclinic("L", 0.0, gamma, settings=shooting_settings)
        right = shoot_heteroclinic("R", 0.0, gamma, settings=shooting_settings)
        assert left.eta_het < 0
        assert right.eta_het > 0
        assert abs(left.gap) < 1e-3

    def test_offset_independent_of_mu1(self, gamma, shooting_settings):
        a = shoot_heteroclinic("L", 0.0, gamma, settings=shooting_settings)
        b = shoot_heteroclinic("L", 0.4, gamma, settings=shooting_settings)
        assert b.eta_het - a.eta_het == pytest.approx(0.4 / gamma.alpha, abs=2 * TOL)

    def test_melnikov_sign(self, gamma, shooting_settings):
        left = shoot_heteroclinic("L", 0.0, gamma, settings=shooting_settings)
        result = melnikov_check(left.orbit, ScaledParams(eta1=left.eta_het), gamma)
        assert result.integral_sign == -1
        assert result.integrand_sign_uniform

    def test_right_value_through_duality(self, gamma, shooting_settings):
        direct = shoot_heteroclinic("R", 0.3, gamma, settings=shooting_settings).eta_het
        dual = right_het_via_left(0.3, gamma, settings=shooting_settings)
        assert abs(direct - dual) < 2 * TOL

    def test_het_curve(self, gamma, shooting_settings):
        curve = build_het_curve(gamma, 1.0, 3, settings=shooting_settings)
        slope_L, slope_R = curve.slopes()
        assert slope_L == pytest.approx(1.0 / gamma.alpha, abs=1e-3)
        assert slope_R == pytest.approx(1.0 / (gamma.alpha + gamma.beta), abs=1e-3)
        assert curve.eta_het0_L < 0 < curve.eta_het0_R
        assert curve.mu1_star == pytest.approx(0.8, abs=0.1)

    def test_ordering_is_reported(self, gamma, shooting_settings):
        report = het_hopf_ordering(gamma, 0.0, settings=shooting_settings)
        assert {"left_het_before_hopf", "right_hopf_before_het"} <= set(report)
