"""Tests for chart maps, chart changes and the parameter scaling."""

import numpy as np
import pytest

from substrate_oscillator.blowup.charts import (
    ScaledParams,
    Stage,
    chart,
    chart_change,
    cylinder1_to_global,
    cylinder2_to_global,
    cylinder_to_sphere,
    global_to_cylinder1,
    global_to_cylinder2,
    point,
    scale_params,
    sphere_to_cylinder,
    to_global,
    unscale_params,
)
from substrate_oscillator.exceptions import InvalidChartError, OutOfOverlapError, ParameterError


class TestCylinderCharts:
    def test_blow_down_values(self):
        assert cylinder1_to_global(point("Cylinder1", "epsbar1", (2.0, 0.5, 0.01))) == pytest.approx(
            (1.02, 0.5, 0.01)
        )
        assert cylinder1_to_global(point("Cylinder1", "xbar1", (0.1, 1.0, 0.05))) == pytest.approx(
            (1.1, 1.0, 0.005)
        )

    def test_change_between_cylinder_charts(self):
        cp = point("Cylinder1", "xbar_neg1", (0.2, 1.3, 0.4))
        moved = chart_change(cp, chart("Cylinder1", "epsbar1"))
        assert to_global(moved) == pytest.approx(to_global(cp), abs=1e-15)
        back = chart_change(moved, chart("Cylinder1", "xbar_neg1"))
        assert back.coords == pytest.approx(cp.coords, abs=1e-14)

    def test_weighted_cylinder_inverse(self):
        cp = global_to_cylinder2(1.3, 0.7, 0.2, "xbar1", k=2)
        assert cylinder2_to_global(cp) == pytest.approx((1.3, 0.7, 0.2), abs=1e-14)

    def test_side_charts_need_their_half_plane(self):
        with pytest.raises(OutOfOverlapError):
            global_to_cylinder1(1.0, 0.5, 0.01, "xbar_neg1")
        with pytest.raises(OutOfOverlapError):
            global_to_cylinder2(0.9, 0.5, 0.1, "xbar1", k=1)
        with pytest.raises(OutOfOverlapError):
            global_to_cylinder1(1.2, 0.5, 0.0, "epsbar1")

    def test_illegal_names_and_domains(self):
        with pytest.raises(InvalidChartError):
            chart("Cylinder1", "rbar1")
        with pytest.raises(InvalidChartError):
            point("Cylinder1", "xbar1", (-0.1, 1.0, 0.1))


class TestSphereCharts:
    def test_blow_down_into_cylinder(self, gamma):
        cp = point("SphereL", "rbar1", (0.1, -1.0, 0.5))
        down = sphere_to_cylinder(cp, gamma)
        assert down.chart == chart("Cylinder2", "xbar_neg1")
        assert down.coords == pytest.approx((0.1, gamma.yL - 0.01, 0.05))

    def test_cocycle(self):
        cp = point("SphereL", "rbar1", (0.3, -0.7, 0.4))
        target = chart("SphereL", "ybar_neg1")
        direct = chart_change(cp, target)
        via = chart_change(chart_change(cp, chart("SphereL", "deltabar1")), target)
        assert via.coords == pytest.approx(direct.coords, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 2])
    def test_chart_change_preserves_global_point(self, gamma, k):
        g = gamma.model_copy(update={"k": k})
        cp = point("SphereR", "rbar1", (0.4, 0.6, 0.8), k=k)
        for name in ("deltabar1", "ybar1"):
            moved = chart_change(cp, chart("SphereR", name))
            assert to_global(moved, g) == pytest.approx(to_global(cp, g), rel=1e-12)

    def test_random_round_trips(self, gamma):
        rng = np.random.default_rng(7)
        source = chart("SphereL", "deltabar1")
        target = chart("SphereL", "rbar1")
        for _ in range(1000):
            coords = (rng.uniform(0.01, 1.0), rng.uniform(0.05, 2.0), rng.uniform(-2.0, 2.0))
            cp = point(source.stage, source.name, coords)
            back = chart_change(chart_change(cp, target), source)
            assert np.allclose(back.coords, cp.coords, rtol=1e-12, atol=1e-12)

    def test_cylinder_to_sphere_inverts_blow_down(self, gamma):
        cp = point("SphereR", "deltabar1", (1.0, 0.3, 0.2))
        down = sphere_to_cylinder(cp, gamma)
        up = cylinder_to_sphere(down, Stage.SPHERE_R, "deltabar1", gamma)
        assert up.coords == pytest.approx(cp.coords, abs=1e-12)

    def test_chart_change_outside_overlap(self):
        cp = point("SphereL", "deltabar1", (0.2, 0.0, 0.5))
        with pytest.raises(OutOfOverlapError):
            chart_change(cp, chart("SphereL", "rbar1"))

    def test_chart_change_across_stages(self):
        cp = point("SphereL", "rbar1", (0.2, 0.1, 0.5))
        with pytest.raises(InvalidChartError):
            chart_change(cp, chart("SphereR", "rbar1"))

    def test_sphere_blow_down_needs_gamma(self):
        with pytest.raises(InvalidChartError):
            to_global(point("SphereL", "rbar1", (0.2, 0.1, 0.5)))


class TestScaling:
    def test_scale_params(self):
        eps, mu, eta = scale_params(0.0064, 0.5, 0.3, k=1)
        assert eps == 0.0064
        assert mu == pytest.approx(0.04)
        assert eta == pytest.approx(1.024)

    def test_unscale_inverts(self):
        eps, mu, eta = scale_params(0.001, 0.7, -0.2, k=2)
        sp = unscale_params(eps, mu, eta, k=2)
        assert sp.mu1 == pytest.approx(0.7)
        assert sp.eta1 == pytest.approx(-0.2)
        assert sp.sigma == pytest.approx(0.1)

    def test_unscale_needs_positive_eps(self):
        with pytest.raises(ParameterError):
            unscale_params(0.0, 0.0, 1.0, k=1)

    def test_offset(self, gamma):
        sp = ScaledParams(eta1=0.2, mu1=0.3)
        assert sp.offset(gamma, "L") == pytest.approx(0.2 - 0.6)
        assert sp.offset(gamma, "R") == pytest.approx(0.2 - 0.2)
