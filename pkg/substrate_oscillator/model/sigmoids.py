"""Sigmoid regularizations and their algebraic tail decompositions.

A sigmoid ``phi`` maps the rescaled distance ``z = (x - 1)/eps`` to (0, 1).
Families with algebraic decay of order ``k`` satisfy::

    phi(z)     = (-z)^-k * phiL(1/(-z))      for z < 0
    1 - phi(z) =    z^-k * phiR(1/z)         for z > 0

with smooth tail functions ``phiL``, ``phiR``. The blow-up charts evaluate the
tails, never ``phi`` itself, near the switching line.
"""

import logging
import math
from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from substrate_oscillator.exceptions import SigmoidDomainError, UnsupportedSpecError

logger = logging.getLogger(__name__)

ScalarFn = Callable[[float], float]

DEFAULT_TAIL_Z0 = 1e3


class SigmoidFamily(str, Enum):
    """Registered sigmoid families."""

    ARCTAN = "arctan"
    HILL = "hill"
    GK = "gk"
    CUSTOM = "custom"


class SigmoidSpec(BaseModel):
    """A regularization function with its decay order and tail coefficients."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: SigmoidFamily
    k: Optional[int] = Field(default=None, ge=1)
    phiL0: Optional[float] = Field(default=None, gt=0)
    phiR0: Optional[float] = Field(default=None, gt=0)
    value_fn: ScalarFn
    derivative_fn: ScalarFn
    tailL_fn: Optional[ScalarFn] = None
    tailR_fn: Optional[ScalarFn] = None
    label: str = ""

    @model_validator(mode="after")
    def check_tail_data(self) -> "SigmoidSpec":
        has_tails = self.tailL_fn is not None and self.tailR_fn is not None
        if has_tails and (self.k is None or self.phiL0 is None or self.phiR0 is None):
            raise ValueError("sigmoids with tails need k, phiL0 and phiR0")
        if self.family == SigmoidFamily.CUSTOM and (
            self.k is None or self.phiL0 is None or self.phiR0 is None
        ):
            raise ValueError("custom sigmoids must supply k, phiL0 and phiR0")
        return self

    @property
    def has_tails(self) -> bool:
        return self.tailL_fn is not None and self.tailR_fn is not None

    def __call__(self, z: float) -> float:
        return self.value_fn(z)

    def tail_left(self, w: float) -> float:
        """phiL(w); raises UnsupportedSpecError when the family has no tails."""
        if self.tailL_fn is None:
            raise UnsupportedSpecError(f"{self.label or self.family.value} has no left tail")
        return self.tailL_fn(w)

    def tail_right(self, w: float) -> float:
        """phiR(w); raises UnsupportedSpecError when the family has no tails."""
        if self.tailR_fn is None:
            raise UnsupportedSpecError(f"{self.label or self.family.value} has no right tail")
        return self.tailR_fn(w)


# Arctan


def _arctan_value(z: float) -> float:
    # arctan(-1/z)/pi avoids cancelling 0.5 against -0.5 far left
    if z < 0:
        return math.atan(-1.0 / z) / math.pi
    return 0.5 + math.atan(z) / math.pi


def _arctan_derivative(z: float) -> float:
    return 1.0 / (math.pi * (1.0 + z * z))


def _arctan_tail(w: float) -> float:
    if w == 0:
        return 1.0 / math.pi
    return math.atan(w) / (math.pi * w)


def arctan_sigmoid() -> SigmoidSpec:
    """phi(z) = 1/2 + arctan(z)/pi, k = 1, phiL(0) = phiR(0) = 1/pi."""
    return SigmoidSpec(
        family=SigmoidFamily.ARCTAN,
        k=1,
        phiL0=1.0 / math.pi,
        phiR0=1.0 / math.pi,
        value_fn=_arctan_value,
        derivative_fn=_arctan_derivative,
        tailL_fn=_arctan_tail,
        tailR_fn=_arctan_tail,
        label="arctan",
    )


# Goldbeter-Koshland


def gk_radicand(z: float, eps_gk: float) -> float:
    return 4.0 + z * z + 2.0 * eps_gk * z * z + 4.0 * eps_gk * z + eps_gk * eps_gk * z * z


def gk_psi(z: float, eps_gk: float = 0.0) -> float:
    """Recentred Goldbeter-Koshland function psi(z, eps_gk).

    Satisfies ``psi((x - 1)/eps_gk, eps_gk) = (G(x) + eps_gk)/(1 + eps_gk)`` where
    ``G`` is the classical form with Michaelis constants equal to ``eps_gk``.

    Raises:
        SigmoidDomainError: If the radicand is negative at ``z``.
    """
    radicand = gk_radicand(z, eps_gk)
    if radicand < 0:
        raise SigmoidDomainError(f"negative radicand {radicand:.3e} at z={z:.6g}")
    root = math.sqrt(radicand)
    numerator = 2.0 + eps_gk * root + 2.0 * eps_gk + eps_gk * z + eps_gk * eps_gk * z
    slope = z * (1.0 - eps_gk)
    if slope > 0:
        # (2 - s + root) = 2 + (root^2 - s^2)/(root + s) for s = z(1 - eps_gk)
        denominator = 2.0 + (4.0 + 4.0 * eps_gk * z + 4.0 * eps_gk * z * z) / (root + slope)
    else:
        denominator = 2.0 - slope + root
    return numerator / (denominator * (1.0 + eps_gk))


def gk_classical(x: float, eps_gk: float) -> float:
    """Classical Goldbeter-Koshland switch G(x), x >= 0, threshold normalized to 1."""
    b = 1.0 - x + eps_gk * (1.0 + x)
    radicand = b * b - 4.0 * (1.0 - x) * x * eps_gk
    if radicand < 0:
        raise SigmoidDomainError(f"negative radicand {radicand:.3e} at x={x:.6g}")
    return 2.0 * eps_gk * x / (b + math.sqrt(radicand))


def _gk_derivative(eps_gk: float) -> ScalarFn:
    def derivative(z: float) -> float:
        h = 1e-6 * max(1.0, abs(z))
        return (gk_psi(z + h, eps_gk) - gk_psi(z - h, eps_gk)) / (2.0 * h)

    return derivative


def _gk_tail(w: float) -> float:
    return 2.0 / (1.0 + 2.0 * w + math.sqrt(1.0 + 4.0 * w * w))


def gk_sigmoid(eps_gk: float = 0.0) -> SigmoidSpec:
    """Goldbeter-Koshland sigmoid; tails are registered only for eps_gk = 0."""
    if eps_gk < 0 or eps_gk >= 1:
        raise SigmoidDomainError(f"eps_gk must lie in [0, 1), got {eps_gk}")
    if eps_gk == 0:
        return SigmoidSpec(
            family=SigmoidFamily.GK,
            k=1,
            phiL0=1.0,
            phiR0=1.0,
            value_fn=lambda z: gk_psi(z, 0.0),
            derivative_fn=_gk_derivative(0.0),
            tailL_fn=_gk_tail,
            tailR_fn=_gk_tail,
            label="gk(0)",
        )
    return SigmoidSpec(
        family=SigmoidFamily.GK,
        value_fn=lambda z: gk_psi(z, eps_gk),
        derivative_fn=_gk_derivative(eps_gk),
        label=f"gk({eps_gk:g})",
    )


# Hill


def hill_function(x: float, n: int) -> float:
    """H_n(x) = x^n/(1 + x^n) for x >= 0."""
    xn = x**n
    return xn / (1.0 + xn)


def _logistic(t: float) -> float:
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def hill_sigmoid(n: int) -> SigmoidSpec:
    """Hill switch in z-form: H_n(exp(z)) = logistic(n z). Exponential tails only."""
    if n < 1:
        raise SigmoidDomainError(f"Hill exponent must be a positive integer, got {n}")

    def derivative(z: float) -> float:
        s = _logistic(n * z)
        return n * s * (1.0 - s)

    return SigmoidSpec(
        family=SigmoidFamily.HILL,
        value_fn=lambda z: _logistic(n * z),
        derivative_fn=derivative,
        label=f"hill({n})",
    )


def custom_sigmoid(
    value_fn: ScalarFn,
    k: int,
    phiL0: float,
    phiR0: float,
    derivative_fn: Optional[ScalarFn] = None,
    tailL_fn: Optional[ScalarFn] = None,
    tailR_fn: Optional[ScalarFn] = None,
) -> SigmoidSpec:
    """User-supplied sigmoid. The decay data is taken as given, never fitted."""
    if derivative_fn is None:

        def derivative_fn(z: float) -> float:
            h = 1e-6 * max(1.0, abs(z))
            return (value_fn(z + h) - value_fn(z - h)) / (2.0 * h)

    return SigmoidSpec(
        family=SigmoidFamily.CUSTOM,
        k=k,
        phiL0=phiL0,
        phiR0=phiR0,
        value_fn=value_fn,
        derivative_fn=derivative_fn,
        tailL_fn=tailL_fn,
        tailR_fn=tailR_fn,
        label="custom",
    )


def power_tail_sigmoid(k: int) -> SigmoidSpec:
    """phi(z) = (1 + |z|)^-k / 2 for z < 0, mirrored for z > 0.

    Decays with any order k; phiL(w) = phiR(w) = (1 + w)^-k / 2. Only C^1 at z = 0,
    which is enough for the chart-consistency checks at k > 1.
    """
    if k < 1:
        raise SigmoidDomainError(f"decay order must be a positive integer, got {k}")

    def value(z: float) -> float:
        if z < 0:
            return 0.5 * (1.0 - z) ** -k
        return 1.0 - 0.5 * (1.0 + z) ** -k

    def derivative(z: float) -> float:
        return 0.5 * k * (1.0 + abs(z)) ** (-k - 1)

    def tail(w: float) -> float:
        return 0.5 * (1.0 + w) ** -k

    spec = custom_sigmoid(
        value, k=k, phiL0=0.5, phiR0=0.5, derivative_fn=derivative, tailL_fn=tail, tailR_fn=tail
    )
    return spec.model_copy(update={"label": f"power({k})"})


def eval_sigmoid(spec: SigmoidSpec, z: float) -> float:
    """phi(z) for the given family."""
    return spec.value_fn(z)


def eval_sigmoid_array(spec: SigmoidSpec, z: np.ndarray) -> np.ndarray:
    return np.array([spec.value_fn(float(v)) for v in np.ravel(z)]).reshape(np.shape(z))


def tail_decomposition(spec: SigmoidSpec, z: float, z0: float = DEFAULT_TAIL_Z0) -> float:
    """Rebuild phi(z) from the tail functions.

    Args:
        spec: Sigmoid with registered tails
        z: Argument with |z| > z0
        z0: Tail validity threshold

    Returns:
        phi(z) computed from phiL or phiR
    """
    if not spec.has_tails:
        raise UnsupportedSpecError(f"{spec.label or spec.family.value} has no registered tails")
    if abs(z) <= z0:
        raise SigmoidDomainError(f"tail form requires |z| > {z0:g}, got z={z:.6g}")
    k = spec.k
    if z < 0:
        w = -1.0 / z
        return w**k * spec.tail_left(w)
    w = 1.0 / z
    return 1.0 - w**k * spec.tail_right(w)


def left_weight(spec: SigmoidSpec, w: float, k: Optional[int] = None) -> float:
    """phi(-1/w) written as w^k phiL(w); exact at w = 0."""
    k = spec.k if k is None else k
    if spec.has_tails:
        return w**k * spec.tail_left(w)
    if w <= 0:
        raise UnsupportedSpecError(f"{spec.label} needs tails to evaluate on the switching line")
    return spec.value_fn(-1.0 / w)


def right_weight(spec: SigmoidSpec, w: float, k: Optional[int] = None) -> float:
    """1 - phi(1/w) written as w^k phiR(w); exact at w = 0."""
    k = spec.k if k is None else k
    if spec.has_tails:
        return w**k * spec.tail_right(w)
    if w <= 0:
        raise UnsupportedSpecError(f"{spec.label} needs tails to evaluate on the switching line")
    return 1.0 - spec.value_fn(1.0 / w)


def inverse_sigmoid(spec: SigmoidSpec, level: float, z_lo: float = -1e8, z_hi: float = 1e8) -> float:
    """z with phi(z) = level for level in (0, 1)."""
    from scipy.optimize import brentq

    if not 0 < level < 1:
        raise SigmoidDomainError(f"level must lie in (0, 1), got {level}")
    return brentq(lambda z: spec.value_fn(z) - level, z_lo, z_hi, xtol=1e-14, rtol=1e-15)


def sigmoid_from_name(
    family: str,
    n: Optional[int] = None,
    eps_gk: float = 0.0,
    k: Optional[int] = None,
    phiL0: Optional[float] = None,
    phiR0: Optional[float] = None,
) -> SigmoidSpec:
    """Build a registered family from its parameter-file description."""
    name = family.strip().lower()
    if name == SigmoidFamily.ARCTAN.value:
        return arctan_sigmoid()
    if name == SigmoidFamily.GK.value:
        return gk_sigmoid(eps_gk)
    if name == SigmoidFamily.HILL.value:
        if n is None:
            raise UnsupportedSpecError("hill sigmoid needs sigmoid.n")
        return hill_sigmoid(n)
    if name == "power":
        return power_tail_sigmoid(k or 1)
    raise UnsupportedSpecError(f"unknown sigmoid family '{family}'")
