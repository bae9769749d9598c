"""Tests for sphere equilibria, Hopf values, manifold seeds, nullclines and duality."""

import logging
import math
from types import SimpleNamespace

import numpy as np
import pytest

from substrate_oscillator.blowup.charts import ScaledParams, Stage
from substrate_oscillator.blowup.fields import sphere_planar_field
from substrate_oscillator.exceptions import ParameterError, SeedCutoffError
from substrate_oscillator.sphere import hopf
from substrate_oscillator.sphere.duality import (
    dual_point,
    field_duality_residual,
    sphere_cycle_probe,
    transform_gamma_to_left,
)
from substrate_oscillator.sphere.equilibria import (
    catalog_equilibria,
    expected_equilibria,
    sphere_stage,
    z_point,
    z_trace,
)
from substrate_oscillator.sphere.hopf import hopf_offset, hopf_value, refined_z
from substrate_oscillator.sphere.manifolds import (
    center_seed_y,
    derived_unstable_seed,
    local_center_seed,
    local_unstable_seed,
    unstable_seed_y,
)
from substrate_oscillator.sphere.nullclines import delta4_zero, nullcline_folds, r4_nullcline


class TestEquilibria:
    def test_z_closed_form(self, gamma):
        Y, D = z_point("L", gamma, -1.0)
        assert Y == pytest.approx(-2.0 - 4.0 / math.pi)
        assert D == pytest.approx(1.0)

    def test_z_absent_on_wrong_side(self, gamma):
        assert z_point("L", gamma, 0.2) is None
        assert z_point("R", gamma, -0.2) is None

    def test_left_catalogue(self, gamma):
        found = {eq.label: eq for eq in catalog_equilibria("L", ScaledParams(eta1=-1.0), gamma)}
        assert set(found) == {"q_w", "q_s", "q_f", "q_r", "a", "b", "z"}
        assert found["z"].coords == pytest.approx((-2.0 - 4.0 / math.pi, 1.0), abs=1e-10)
        assert found["q_r"].coords == pytest.approx((0.0, -4.0 / math.pi), abs=1e-10)
        assert found["q_r"].classification == "nonhyperbolic_saddle"
        assert found["z"].classification == "stable_node"

    def test_right_catalogue_without_z(self, gamma):
        found = catalog_equilibria("R", ScaledParams(eta1=-0.5), gamma)
        labels = [eq.label for eq in found]
        assert "z" not in labels
        assert len(labels) == 6
        q_r = next(eq for eq in found if eq.label == "q_r")
        assert q_r.classification == "nonhyperbolic_node"

    def test_catalogue_is_offset_only(self, gamma):
        a = expected_equilibria("L", gamma, ScaledParams(eta1=0.0, mu1=0.5).offset(gamma, "L"))
        b = expected_equilibria("L", gamma, ScaledParams(eta1=-1.0, mu1=0.0).offset(gamma, "L"))
        assert a == b

    def test_side_validation(self):
        with pytest.raises(ParameterError):
            sphere_stage("M")


class TestHopf:
    def test_closed_form_offsets(self, gamma):
        assert hopf_offset("L", gamma) == pytest.approx(-0.65147, abs=1e-5)
        assert hopf_offset("R", gamma) == pytest.approx(0.29135, abs=1e-5)

    def test_trace_vanishes_at_hopf(self, gamma):
        for side in ("L", "R"):
            assert z_trace(side, gamma, hopf_offset(side, gamma)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("side", ["L", "R"])
    @pytest.mark.parametrize("k", [1, 2])
    def test_numeric_matches_closed_form(self, gamma, side, k):
        g = gamma.model_copy(update={"k": k})
        result = hopf_value(side, 0.3, g)
        assert abs(result.eta_H - result.eta_H_numeric) < 1e-6
        assert result.determinant > 0

    def test_subcritical(self, gamma):
        assert hopf_value("L", 0.0, gamma).lyapunov_sign == 1
        assert hopf_value("R", 0.0, gamma).lyapunov_sign == 1

    def test_shifts_with_mu1(self, gamma):
        shift = hopf_value("L", 0.5, gamma).eta_H - hopf_value("L", 0.0, gamma).eta_H
        assert shift == pytest.approx(0.5 / gamma.alpha)

    def test_failed_polish_keeps_closed_form(self, gamma, monkeypatch, caplog):
        monkeypatch.setattr(
            hopf, "root", lambda *args, **kwargs: SimpleNamespace(success=False, message="no progress", x=None)
        )
        with caplog.at_level(logging.DEBUG, logger=hopf.__name__):
            z = refined_z("L", gamma, -1.0)
        assert tuple(z) == z_point("L", gamma, -1.0)
        assert "no progress" in caplog.text


class TestSeeds:
    def test_unstable_series_value(self, gamma):
        assert unstable_seed_y("L", gamma, -0.5, 0.05) == pytest.approx(-1.0281831, abs=1e-7)

    def test_unstable_base_point(self, gamma):
        assert unstable_seed_y("L", gamma, -0.5, 0.0) == pytest.approx(-(1 - gamma.alpha) / gamma.alpha)

    def test_center_series_value(self, gamma):
        assert center_seed_y("L", gamma, -0.5, 0.1) == pytest.approx(-1.2926112, abs=1e-7)
        assert center_seed_y("L", gamma, -0.5, 0.0) == pytest.approx(-4.0 / math.pi)

    def test_seed_cutoff(self, gamma):
        sp = ScaledParams(eta1=-0.5)
        with pytest.raises(SeedCutoffError):
            local_unstable_seed("L", sp, gamma, 0.3)
        with pytest.raises(SeedCutoffError):
            local_center_seed("L", sp, gamma, 0.0)

    def test_seed_charts(self, gamma):
        sp = ScaledParams(eta1=-0.5)
        assert local_unstable_seed("L", sp, gamma, 0.05).chart.name == "rbar1"
        assert local_center_seed("R", sp, gamma, 0.05).chart.stage == Stage.SPHERE_R

    def test_derived_series_is_more_invariant(self, gamma):
        offset, D, h = -0.5, 0.01, 1e-5
        field = sphere_planar_field(Stage.SPHERE_L, "rbar1", gamma, offset)

        def defect(derived: bool) -> float:
            y = unstable_seed_y("L", gamma, offset, D, derived)
            slope = (
                unstable_seed_y("L", gamma, offset, D + h, derived)
                - unstable_seed_y("L", gamma, offset, D - h, derived)
            ) / (2 * h)
            dY, dD = field(0.0, np.array([y, D]))
            return abs(dY - slope * dD)

        assert defect(True) < 0.1 * defect(False)
        seed = derived_unstable_seed("L", ScaledParams(eta1=offset), gamma, D)
        assert seed.coords[1] == pytest.approx(unstable_seed_y("L", gamma, offset, D, True))


class TestNullclines:
    def test_delta4_zero(self, gamma):
        assert delta4_zero(gamma) == pytest.approx(0.8862, abs=1e-4)

    def test_no_folds_at_or_above_boundary(self, gamma):
        folds = nullcline_folds(ScaledParams(eta1=0.1), gamma)
        assert folds.count == 0
        assert folds.topology == "a"

    def test_no_folds_close_below_boundary(self, gamma):
        assert nullcline_folds(ScaledParams(eta1=-1e-3), gamma).count == 0

    def test_two_folds_far_below_boundary(self, gamma):
        folds = nullcline_folds(ScaledParams(eta1=-1e3), gamma)
        assert folds.count == 2
        assert folds.topology == "c"
        for r4, d4 in folds.locations:
            assert r4 > 0
            assert 0 < d4 < folds.delta4_0

    def test_r4_nullcline(self, gamma):
        sp = ScaledParams(eta1=-1.0)
        values = r4_nullcline(sp, gamma, [0.0, 0.5, 1.0])
        assert values[-1] == pytest.approx(0.0, abs=1e-12)
        assert np.all(values[:-1] > 0)
        with pytest.raises(ParameterError):
            r4_nullcline(ScaledParams(eta1=0.5), gamma, [0.1])


class TestDuality:
    def test_transformed_parameters(self, gamma):
        left = transform_gamma_to_left(gamma)
        assert left.alpha == pytest.approx(1.0 / 1.5)
        assert left.phiL0 == pytest.approx(gamma.phiR0 / 1.5**3)

    def test_fields_conjugate(self, gamma):
        for offset in (-0.4, 0.3):
            assert field_duality_residual(gamma, offset, n=50) < 1e-10

    def test_maps_right_z_to_left_z(self, gamma):
        offset = 0.8
        left = transform_gamma_to_left(gamma)
        image = dual_point(gamma, z_point("R", gamma, offset))
        assert tuple(image) == pytest.approx(z_point("L", left, -offset), rel=1e-12)

    @pytest.mark.slow
    def test_cycle_probe_finds_repelling_cycle(self, gamma):
        assert sphere_cycle_probe("L", gamma).detected
