"""Tests for integration, return maps, limit cycles, equilibria and curve geometry."""

import math

import numpy as np
import pytest

from substrate_oscillator.exceptions import ConvergenceError, NoReturnError
from substrate_oscillator.model.system import ModelParams
from substrate_oscillator.numerics.equilibria import classify_eigenvalues, find_equilibria
from substrate_oscillator.numerics.geometry import hausdorff_distance, polyline_crossing, resample_polyline
from substrate_oscillator.numerics.hopf import first_lyapunov_coefficient
from substrate_oscillator.numerics.integrate import IntegratorConfig, Trajectory, integrate, negated
from substrate_oscillator.numerics.returns import (
    Section,
    find_limit_cycle,
    poincare_return,
    return_map_lipschitz,
    trajectory_residence,
)
from substrate_oscillator.pws.limits import left_system

RATE = 0.05


def radial_field(sign: float):
    """Rotation at unit speed with r' = sign * RATE * r (r^2 - 1); the unit circle is the cycle."""

    def field(t, u):
        x, y = u
        growth = sign * RATE * (x * x + y * y - 1.0)
        return np.array([-y + growth * x, x + growth * y])

    return field


def cubic_focus(sign: float):
    def field(t, u):
        x, y = u
        r2 = x * x + y * y
        return np.array([-y + sign * x * r2, x + sign * y * r2])

    return field


class TestIntegrate:
    def test_decay(self, fast_cfg):
        traj = integrate(lambda t, u: -u, [1.0], (0.0, 1.0), fast_cfg)
        assert traj.final_state[0] == pytest.approx(math.exp(-1.0), rel=1e-7)
        assert traj.method == "RK45"

    def test_backward_time(self, fast_cfg):
        traj = integrate(lambda t, u: -u, [1.0], (0.0, -1.0), fast_cfg)
        assert traj.final_state[0] == pytest.approx(math.e, rel=1e-7)

    def test_stiff_fallback(self, fast_cfg):
        def stiff(t, u):
            return -1000.0 * (u - math.cos(t))

        traj = integrate(stiff, [0.0], (0.0, 10.0), fast_cfg.with_(nfev_budget=100))
        assert traj.method == "Radau"
        assert traj.final_state[0] == pytest.approx(math.cos(10.0), abs=1e-2)

    def test_negated(self):
        field = negated(lambda t, u: np.array([1.0, -2.0]))
        assert tuple(field(0.0, np.zeros(2))) == (-1.0, 2.0)

    def test_rows(self, fast_cfg):
        traj = integrate(lambda t, u: -u, [1.0, 2.0], (0.0, 1.0), fast_cfg, t_eval=np.linspace(0, 1, 5))
        rows = traj.rows()
        assert len(rows) == 5
        assert rows[0] == (0.0, 1.0, 2.0)


class TestReturns:
    def test_poincare_return_of_rotation(self, fast_cfg):
        section = Section.horizontal(0.0, (0.2, 2.0), upward=True)
        u, t = poincare_return(radial_field(-1.0), section, (1.0, 0.0), fast_cfg)
        assert t == pytest.approx(2 * math.pi, rel=1e-6)
        assert u[0] == pytest.approx(1.0, abs=1e-7)

    def test_no_return(self, fast_cfg):
        section = Section.horizontal(5.0, (0.0, 1.0))
        with pytest.raises(NoReturnError):
            poincare_return(lambda t, u: -u, section, (1.0, 1.0), fast_cfg, t_max=20.0)

    def test_attracting_cycle(self, fast_cfg):
        field = radial_field(-1.0)
        section = Section.horizontal(0.0, (0.2, 2.0), upward=True)
        cycle = find_limit_cycle(field, (0.5, 0.0), section, fast_cfg)
        assert cycle.period == pytest.approx(2 * math.pi, rel=1e-6)
        assert cycle.max_x == pytest.approx(1.0, abs=1e-5)
        assert cycle.l2_norm == pytest.approx(1.0, abs=1e-5)
        assert cycle.stability == "attracting"
        assert cycle.multiplier == pytest.approx(math.exp(-4 * math.pi * RATE), abs=0.05)
        assert return_map_lipschitz(field, cycle, section, fast_cfg) < 1.0

    def test_repelling_cycle_in_reverse_time(self, fast_cfg):
        # the reversed rotation crosses y = 0 downward at x > 0
        section = Section.horizontal(0.0, (0.2, 2.0), upward=False)
        cycle = find_limit_cycle(radial_field(1.0), (1.3, 0.0), section, fast_cfg, reverse_time=True)
        assert cycle.period == pytest.approx(2 * math.pi, rel=1e-6)
        assert cycle.stability == "repelling"
        assert cycle.multiplier == pytest.approx(math.exp(4 * math.pi * RATE), abs=0.1)
        assert cycle.times[0] == pytest.approx(0.0)

    def test_guess_outside_section(self, fast_cfg):
        section = Section.horizontal(0.0, (0.2, 2.0))
        with pytest.raises(ConvergenceError):
            find_limit_cycle(radial_field(-1.0), (3.0, 0.0), section, fast_cfg)

    def test_residence(self):
        t = np.linspace(0.0, 1.0, 101)
        states = np.column_stack([np.where(t < 0.5, 1.0, 3.0), np.zeros_like(t)])
        traj = Trajectory(t=t, states=states, method="RK45", nfev=0)
        assert trajectory_residence(traj) == pytest.approx(0.5, abs=0.02)


class TestEquilibria:
    def test_classification(self):
        assert classify_eigenvalues([-1.0, 2.0]) == "saddle"
        assert classify_eigenvalues([-1.0, -2.0]) == "stable_node"
        assert classify_eigenvalues([0.5 + 1j, 0.5 - 1j]) == "unstable_focus"
        assert classify_eigenvalues([0.0, -1.0]) == "nonhyperbolic"

    def test_linear_node(self):
        system = left_system(ModelParams(alpha=0.5, beta=2.0, eta=0.9, eps=0.0))
        found = find_equilibria(system, ((0.0, 2.0), (0.0, 3.0)), IntegratorConfig(equilibrium_grid=4))
        assert len(found) == 1
        assert found[0].location == pytest.approx([0.9, 1.8])
        assert found[0].classification == "stable_node"

    def test_empty_box(self):
        system = left_system(ModelParams(alpha=0.5, beta=2.0, eta=0.9, eps=0.0))
        assert find_equilibria(system, ((2.0, 3.0), (2.0, 3.0)), IntegratorConfig(equilibrium_grid=3)) == []


class TestLyapunov:
    def test_subcritical_oracle(self):
        assert first_lyapunov_coefficient(cubic_focus(1.0), (0.0, 0.0)) == pytest.approx(1.0, rel=1e-4)

    def test_supercritical_sign(self):
        assert first_lyapunov_coefficient(cubic_focus(-1.0), (0.0, 0.0)) < 0


class TestGeometry:
    def test_parallel_segments(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([[0.0, 1.0], [1.0, 1.0]])
        assert hausdorff_distance(a, b, n=50) == pytest.approx(1.0)

    def test_resample_is_uniform(self):
        curve = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 3.0]])
        points = resample_polyline(curve, 5)
        assert points[0] == pytest.approx([0.0, 0.0])
        assert points[-1] == pytest.approx([1.0, 3.0])
        assert points[1] == pytest.approx([1.0, 0.0])

    def test_crossing(self):
        curve = np.array([[0.0, 0.0], [1.0, 2.0], [2.0, 0.0]])
        assert polyline_crossing(curve, 1.0) == pytest.approx([0.5, 1.0])
        assert polyline_crossing(curve, 1.0, upward=False) == pytest.approx([1.5, 1.0])
        with pytest.raises(ConvergenceError):
            polyline_crossing(curve, 5.0)
