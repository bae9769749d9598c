"""Tests for the eps = 0 limit: linear fields, boundary values and singular cycles."""

import numpy as np
import pytest

from substrate_oscillator.exceptions import ParameterError
from substrate_oscillator.model.system import ModelParams
from substrate_oscillator.pws.limits import (
    NodePosition,
    classify_node_position,
    eta_boundaries,
    left_system,
    node_eigensolutions,
    pws_fields,
    pws_structure,
)
from substrate_oscillator.pws.singular_cycle import (
    build_singular_cycle,
    crossing_cycle,
    generic_singular_cycle,
    is_regular_crossing,
)


@pytest.fixture
def pwl() -> ModelParams:
    return ModelParams(alpha=0.5, beta=2.0, eta=1.0, mu=0.0, eps=0.0)


class TestLinearLimits:
    def test_eta_boundaries(self, pwl):
        assert eta_boundaries(pwl.with_(mu=0.1)) == pytest.approx((1.04, 1.2))

    def test_eta_boundaries_need_nonnegative_mu(self, pwl):
        with pytest.raises(ParameterError):
            eta_boundaries(pwl.with_(mu=-0.1))

    def test_structure(self, pwl):
        s = pws_structure(pwl)
        assert s.yL == pytest.approx(2.0)
        assert s.yR == pytest.approx(0.4)
        # at eta = 1, mu = 0 both nodes sit on the switching line
        assert s.zL == pytest.approx((1.0, 2.0))
        assert s.zR == pytest.approx((1.0, 0.4))

    def test_node_positions(self, pwl):
        assert classify_node_position(pwl) == {"L": NodePosition.BOUNDARY, "R": NodePosition.BOUNDARY}
        assert classify_node_position(pwl.with_(eta=1.1)) == {
            "L": NodePosition.VIRTUAL,
            "R": NodePosition.REAL,
        }
        assert classify_node_position(pwl.with_(eta=0.9)) == {
            "L": NodePosition.REAL,
            "R": NodePosition.VIRTUAL,
        }

    def test_eigensolutions(self, pwl):
        p = pwl.with_(mu=0.05)
        for side, system in zip(("L", "R"), pws_fields(p)):
            for pair in node_eigensolutions(p)[side]:
                v = np.array(pair.vector)
                assert np.allclose(system.matrix @ v, pair.value * v)

    def test_closed_form_flow_reaches_node(self, pwl):
        system = left_system(pwl.with_(eta=0.9))
        end = system.flow(np.array([0.2, 0.3]), 50.0)
        assert np.linalg.norm(end - system.node) < 1e-6
        assert system.flow(np.array([0.2, 0.3]), 0.0) == pytest.approx([0.2, 0.3])


class TestSingularCycle:
    def test_gamma0_closes(self, pwl):
        cycle = build_singular_cycle(pwl)
        assert cycle.closure_gap < 1e-6
        assert cycle.gammaL[0] == pytest.approx([1.0, 0.4])
        assert cycle.gammaL[-1] == pytest.approx([1.0, 2.0])
        assert cycle.gammaR[0] == pytest.approx([1.0, 2.0])

    def test_gamma0_amplitude(self, pwl):
        cycle = build_singular_cycle(pwl)
        assert 1.5 <= np.max(cycle.gammaR[:, 0]) <= 1.9
        assert np.max(cycle.gammaL[:, 0]) <= 1.0 + 1e-12

    def test_gamma0_rows(self, pwl):
        cycle = build_singular_cycle(pwl)
        rows = cycle.rows()
        assert len(rows) == len(cycle.gammaL) + len(cycle.gammaR)
        assert {r[0] for r in rows} == {"L", "R"}

    def test_gamma0_needs_eta_one(self, pwl):
        with pytest.raises(ParameterError):
            build_singular_cycle(pwl.with_(eta=1.05))

    def test_generic_cycle_for_negative_mu(self, pwl):
        p = pwl.with_(mu=-0.05)
        cycle = generic_singular_cycle(p)
        q = np.array(cycle.crossing_point)
        assert q[0] == pytest.approx(1.0)
        assert is_regular_crossing(p.with_(eta=0.9), q)

    def test_generic_cycle_needs_negative_mu(self, pwl):
        with pytest.raises(ParameterError):
            generic_singular_cycle(pwl)

    def test_crossing_cycle_closes(self, pwl):
        p = pwl.with_(mu=-0.05, eta=0.94)
        cycle = crossing_cycle(p)
        assert cycle.closure_gap < 1e-8
        assert cycle.crossing_point[0] == 1.0

    def test_crossing_cycle_needs_eta_between_boundaries(self, pwl):
        with pytest.raises(ParameterError):
            crossing_cycle(pwl.with_(mu=-0.05, eta=0.99))
