"""Piecewise-smooth systems regularized by a sigmoid blend across x = 1."""

import logging
from dataclasses import dataclass

import numpy as np

from substrate_oscillator.exceptions import ParameterError
from substrate_oscillator.model.sigmoids import SigmoidSpec
from substrate_oscillator.model.system import ModelParams, PlanarField, PlanarState
from substrate_oscillator.pws.limits import pws_fields

logger = logging.getLogger(__name__)

SWITCH_X = 1.0


@dataclass(frozen=True)
class BlendedPws:
    """X^L (x < 1) and X^R (x > 1) joined by phi((x - 1)/eps)."""

    left_field: PlanarField
    right_field: PlanarField
    sigmoid: SigmoidSpec
    eps: float
    switch_x: float = SWITCH_X

    def weight(self, x: float) -> float:
        return self.sigmoid.value_fn((x - self.switch_x) / self.eps)

    def as_field(self) -> PlanarField:
        if self.eps <= 0:
            raise ParameterError("blended fields need eps > 0")

        def field(t: float, u: np.ndarray) -> np.ndarray:
            phi = self.weight(u[0])
            return (1.0 - phi) * self.left_field(t, u) + phi * self.right_field(t, u)

        return field


def blended_field(b: BlendedPws, s: PlanarState) -> tuple[float, float]:
    """X^L(s)(1 - phi) + X^R(s) phi at a single state."""
    value = b.as_field()(0.0, np.array([s.x, s.y], dtype=float))
    return float(value[0]), float(value[1])


def substrate_depletion_blend(p: ModelParams, spec: SigmoidSpec) -> BlendedPws:
    """The substrate-depletion model written as a blend of its two linear limits."""
    left, right = pws_fields(p)
    return BlendedPws(left_field=left, right_field=right, sigmoid=spec, eps=p.eps)
