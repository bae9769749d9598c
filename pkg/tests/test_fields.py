"""Tests for the desingularized chart fields and their consistency with the global field."""

import numpy as np
import pytest

from substrate_oscillator.blowup.charts import LEGAL_CHARTS, ScaledParams, Stage, chart, point
from substrate_oscillator.blowup.consistency import (
    coupling_residual,
    invariance_residual,
    pushforward_consistency,
    verify_blowup,
)
from substrate_oscillator.blowup.fields import (
    cylinder1_field,
    make_chart_field,
    slow_flow_saddle,
    slow_reduced_flow,
    sphere_field,
    sphere_planar_field,
)
from substrate_oscillator.exceptions import InvalidChartError, ParameterError
from substrate_oscillator.model.sigmoids import arctan_sigmoid


class TestPushforward:
    @pytest.mark.parametrize("k", [1, 2])
    def test_every_chart_consistent(self, k):
        rows = verify_blowup(k=k, n_samples=100, seed=3)
        assert len(rows) == sum(len(names) for names in LEGAL_CHARTS.values())
        for row in rows:
            assert row.max_residual < 1e-8, f"{row.stage}/{row.chart}"

    @pytest.mark.parametrize("k, n_samples", [(0, 10), (1, 0), (1, -3)])
    def test_rejects_bad_arguments(self, k, n_samples):
        with pytest.raises(ParameterError):
            verify_blowup(k=k, n_samples=n_samples)

    def test_single_point(self, reference_params):
        cp = point("Cylinder1", "xbar1", (0.3, 0.7, 0.2))
        assert pushforward_consistency(cp, reference_params) < 1e-10

    def test_boundary_points_rejected(self, reference_params):
        cp = point("Cylinder1", "xbar1", (0.0, 0.7, 0.2))
        with pytest.raises(InvalidChartError):
            pushforward_consistency(cp, reference_params)


class TestInvariantSets:
    def test_cylinder_sets(self, reference_params):
        spec = arctan_sigmoid()
        for name in LEGAL_CHARTS[Stage.CYLINDER1]:
            assert invariance_residual(chart("Cylinder1", name), reference_params, None, spec, n=50) < 1e-12

    def test_sphere_sets(self, gamma):
        sp = ScaledParams(eta1=-0.4, mu1=0.2)
        for stage in (Stage.SPHERE_L, Stage.SPHERE_R):
            for name in LEGAL_CHARTS[stage]:
                assert invariance_residual(chart(stage, name), sp, gamma, None, n=50) < 1e-12

    def test_rho_zero_sees_only_the_offset(self, gamma):
        offset = -0.7
        pairs = [(offset + mu1 / gamma.alpha, mu1) for mu1 in (0.0, 0.3, 1.1)]
        states = [(-1.2, 0.5), (0.4, 1.3), (2.0, 0.2)]
        assert coupling_residual(Stage.SPHERE_L, "rbar1", gamma, pairs, states) < 1e-12


class TestChartFields:
    def test_sphere_field_on_cylinder_stage(self, gamma):
        with pytest.raises(InvalidChartError):
            sphere_field(Stage.CYLINDER2, "xbar1", ScaledParams(eta1=0.0), gamma, (0.1, 0.2, 0.3))

    def test_unknown_cylinder_chart(self, reference_params, arctan):
        with pytest.raises(InvalidChartError):
            cylinder1_field("ybar1", reference_params, arctan, (0.1, 0.2, 0.3))

    def test_parameter_types_checked(self, reference_params, gamma, arctan):
        with pytest.raises(InvalidChartError):
            make_chart_field(chart("SphereL", "rbar1"), reference_params, gamma, arctan)
        with pytest.raises(InvalidChartError):
            make_chart_field(chart("Cylinder1", "epsbar1"), ScaledParams(eta1=0.0), gamma, arctan)

    def test_z_is_an_equilibrium_of_the_planar_field(self, gamma):
        field = sphere_planar_field(Stage.SPHERE_L, "rbar1", gamma, -1.0)
        z = np.array([-2.0 - 4.0 / np.pi, 1.0])
        assert np.max(np.abs(field(0.0, z))) < 1e-12

    def test_slow_flow(self, gamma, arctan):
        assert slow_flow_saddle(ScaledParams(eta1=0.3, mu1=0.0), gamma, arctan) is None
        sp = ScaledParams(eta1=1.0, mu1=0.9)
        x2, y2 = slow_flow_saddle(sp, gamma, arctan)
        assert y2 == pytest.approx(1.0 / 0.9)
        assert slow_reduced_flow(sp, y2) == pytest.approx(0.0, abs=1e-15)
        assert arctan(x2) == pytest.approx((1.0 / y2 - gamma.alpha) / gamma.beta)
