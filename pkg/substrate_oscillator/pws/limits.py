"""The eps = 0 limit: two linear systems glued along x = 1."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import expm

from substrate_oscillator.exceptions import ParameterError
from substrate_oscillator.model.system import ModelParams, PlanarField

logger = logging.getLogger(__name__)

BOUNDARY_ATOL = 1e-12


class NodePosition(str, Enum):
    REAL = "real"
    BOUNDARY = "boundary"
    VIRTUAL = "virtual"


@dataclass(frozen=True)
class LinearSystem:
    """u' = A u + b with a stable node at -A^{-1} b."""

    matrix: np.ndarray
    offset: np.ndarray

    @property
    def node(self) -> np.ndarray:
        return -np.linalg.solve(self.matrix, self.offset)

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u + self.offset

    def flow(self, u0: np.ndarray, t: float) -> np.ndarray:
        """Closed-form solution z + expm(A t)(u0 - z)."""
        z = self.node
        return z + expm(self.matrix * t) @ (np.asarray(u0, dtype=float) - z)


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: tuple[float, float]


@dataclass(frozen=True)
class PwsStructure:
    """Asymptotes, tangency points, nodes and boundary values of the PWL limit."""

    yL: float
    yR: float
    pL: tuple[float, float]
    pR: tuple[float, float]
    zL: tuple[float, float]
    zR: tuple[float, float]
    etaL_mu: float
    etaR_mu: float
    node_eigensolutions: dict[str, list[EigenPair]] = field(default_factory=dict)


def left_system(p: ModelParams) -> LinearSystem:
    return LinearSystem(
        matrix=np.array([[-1.0, p.alpha], [0.0, -(p.mu + p.alpha)]]),
        offset=np.array([0.0, p.eta]),
    )


def right_system(p: ModelParams) -> LinearSystem:
    rate = p.alpha + p.beta
    return LinearSystem(
        matrix=np.array([[-1.0, rate], [0.0, -(p.mu + rate)]]),
        offset=np.array([0.0, p.eta]),
    )


def pws_fields(p: ModelParams) -> tuple[PlanarField, PlanarField]:
    """(alpha y - x, eta - (mu + alpha) y) and ((alpha + beta) y - x, eta - (mu + alpha + beta) y)."""
    return left_system(p), right_system(p)


def eta_boundaries(p: ModelParams) -> tuple[float, float]:
    """(eta^R(mu), eta^L(mu)) = (1 + mu/(alpha + beta), 1 + mu/alpha)."""
    if p.mu < 0:
        raise ParameterError(f"eta boundaries are ordered for mu >= 0, got mu={p.mu:g}")
    return 1.0 + p.mu / (p.alpha + p.beta), 1.0 + p.mu / p.alpha


def left_node(p: ModelParams) -> tuple[float, float]:
    return p.alpha * p.eta / (p.mu + p.alpha), p.eta / (p.mu + p.alpha)


def right_node(p: ModelParams) -> tuple[float, float]:
    rate = p.alpha + p.beta
    return rate * p.eta / (p.mu + rate), p.eta / (p.mu + rate)


def node_eigensolutions(p: ModelParams) -> dict[str, list[EigenPair]]:
    """Eigenpairs (-1, (1, 0)) and (-(mu + rate), (rate, 1 - mu - rate)) per side."""
    pairs = {}
    for side, rate in (("L", p.alpha), ("R", p.alpha + p.beta)):
        pairs[side] = [
            EigenPair(-1.0, (1.0, 0.0)),
            EigenPair(-(p.mu + rate), (rate, 1.0 - p.mu - rate)),
        ]
    return pairs


def pws_structure(p: ModelParams) -> PwsStructure:
    yL = 1.0 / p.alpha
    yR = 1.0 / (p.alpha + p.beta)
    return PwsStructure(
        yL=yL,
        yR=yR,
        pL=(1.0, yL),
        pR=(1.0, yR),
        zL=left_node(p),
        zR=right_node(p),
        etaL_mu=1.0 + p.mu / p.alpha,
        etaR_mu=1.0 + p.mu / (p.alpha + p.beta),
        node_eigensolutions=node_eigensolutions(p),
    )


def classify_node_position(p: ModelParams) -> dict[str, NodePosition]:
    """z^L is real iff eta < eta^L(mu); z^R is real iff eta > eta^R(mu)."""
    etaL = 1.0 + p.mu / p.alpha
    etaR = 1.0 + p.mu / (p.alpha + p.beta)

    def position(distance: float) -> NodePosition:
        if math.isclose(distance, 0.0, abs_tol=BOUNDARY_ATOL):
            return NodePosition.BOUNDARY
        return NodePosition.REAL if distance > 0 else NodePosition.VIRTUAL

    return {"L": position(etaL - p.eta), "R": position(p.eta - etaR)}
