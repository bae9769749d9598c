"""Flat ``key = value`` parameter files.

Example::

    # reference relaxation regime
    alpha = 0.5
    beta = 2
    eta = 1
    eps = 0.0064
    sigmoid.family = arctan

Numbers are parsed as decimals. Unknown keys, malformed numbers and
contradictory entries raise ConfigError.
"""

import logging
from decimal import Decimal
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from substrate_oscillator.blowup.charts import scale_params
from substrate_oscillator.exceptions import ConfigError, OscillatorError
from substrate_oscillator.model.sigmoids import SigmoidSpec, sigmoid_from_name
from substrate_oscillator.model.system import GammaVector, ModelParams

logger = logging.getLogger(__name__)


class ParameterFile(BaseModel):
    """Validated contents of a parameter file; dotted keys map to the sigmoid_* fields."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: Optional[Decimal] = None
    beta: Optional[Decimal] = None
    eta: Optional[Decimal] = None
    mu: Optional[Decimal] = None
    eps: Optional[Decimal] = None
    mu1: Optional[Decimal] = None
    eta1: Optional[Decimal] = None
    sigmoid_family: str = Field(default="arctan", alias="sigmoid.family")
    sigmoid_n: Optional[int] = Field(default=None, alias="sigmoid.n", ge=1)
    sigmoid_k: Optional[int] = Field(default=None, alias="sigmoid.k", ge=1)
    sigmoid_eps_gk: Decimal = Field(default=Decimal(0), alias="sigmoid.eps_gk")
    sigmoid_phiL0: Optional[Decimal] = Field(default=None, alias="sigmoid.phiL0", gt=0)
    sigmoid_phiR0: Optional[Decimal] = Field(default=None, alias="sigmoid.phiR0", gt=0)

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ConfigError(f"missing parameter(s): {', '.join(missing)}")

    @property
    def scaled(self) -> bool:
        return self.eta1 is not None or self.mu1 is not None


def read_parameter_file(path: str | Path) -> ParameterFile:
    """Parse and validate a parameter file.

    Raises:
        ConfigError: If the file is missing, a key is unknown or a value malformed
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"parameter file not found: {path}")
    values = dotenv_values(path)
    empty = [key for key, value in values.items() if value is None or value.strip() == ""]
    if empty:
        raise ConfigError(f"{path}: no value for {', '.join(empty)}")
    try:
        params = ParameterFile.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"{path}: {problems}") from e
    logger.debug(f"Read {len(values)} parameters from {path}")
    return params


def _float(value: Optional[Decimal], default: float = 0.0) -> float:
    return default if value is None else float(value)


def _sigmoid(params: ParameterFile) -> SigmoidSpec:
    if params.sigmoid_family.strip().lower() == "custom":
        raise ConfigError("custom sigmoids carry a function and cannot be read from a parameter file")
    spec = sigmoid_from_name(
        params.sigmoid_family,
        n=params.sigmoid_n,
        eps_gk=float(params.sigmoid_eps_gk),
        k=params.sigmoid_k,
    )
    if params.sigmoid_k is not None and spec.k is not None and params.sigmoid_k != spec.k:
        raise ConfigError(f"sigmoid.k = {params.sigmoid_k} contradicts {spec.label} (k = {spec.k})")
    for key, given, known in (
        ("sigmoid.phiL0", params.sigmoid_phiL0, spec.phiL0),
        ("sigmoid.phiR0", params.sigmoid_phiR0, spec.phiR0),
    ):
        if given is not None and known is not None and abs(float(given) - known) > 1e-12 * known:
            raise ConfigError(f"{key} = {given} contradicts {spec.label} ({known!r})")
    return spec


def model_from_file(params: ParameterFile) -> tuple[ModelParams, SigmoidSpec]:
    """ModelParams and sigmoid from parsed contents.

    Either (eta, mu) or the scaled (eta1, mu1) may be given, not both; scaled
    values need eps and a sigmoid with a decay order.
    """
    params.require("alpha", "beta")
    try:
        spec = _sigmoid(params)
        if params.scaled:
            if params.eta is not None or params.mu is not None:
                raise ConfigError("give either eta/mu or the scaled eta1/mu1, not both")
            params.require("eps")
            if spec.k is None:
                raise ConfigError(f"scaled parameters need a decay order; {spec.label} has none")
            eps, mu, eta = scale_params(float(params.eps), _float(params.mu1), _float(params.eta1), spec.k)
        else:
            params.require("eta")
            eps, mu, eta = _float(params.eps), _float(params.mu), float(params.eta)
        model = ModelParams(alpha=float(params.alpha), beta=float(params.beta), eta=eta, mu=mu, eps=eps)
    except ValidationError as e:
        raise ConfigError(f"invalid model parameters: {e.errors()[0]['msg']}") from e
    except ConfigError:
        raise
    except OscillatorError as e:
        raise ConfigError(e.message) from e
    return model, spec


def load_model(path: str | Path) -> tuple[ModelParams, SigmoidSpec]:
    """Read (ModelParams, SigmoidSpec) from a parameter file."""
    return model_from_file(read_parameter_file(path))


def load_scaled(path: str | Path) -> tuple[float, float, float]:
    """(eps, mu1, eta1) from a parameter file holding scaled values."""
    params = read_parameter_file(path)
    params.require("eps")
    if not params.scaled:
        raise ConfigError(f"{path}: expected scaled parameters mu1/eta1")
    return float(params.eps), _float(params.mu1), _float(params.eta1)


def gamma_from_file(params: ParameterFile) -> GammaVector:
    params.require("alpha", "beta")
    explicit = (params.sigmoid_k, params.sigmoid_phiL0, params.sigmoid_phiR0)
    try:
        if all(v is not None for v in explicit):
            k, phiL0, phiR0 = params.sigmoid_k, float(params.sigmoid_phiL0), float(params.sigmoid_phiR0)
        else:
            spec = _sigmoid(params)
            if spec.k is None:
                raise ConfigError(
                    f"{spec.label} has no tail data; give sigmoid.k, sigmoid.phiL0 and sigmoid.phiR0"
                )
            k, phiL0, phiR0 = spec.k, spec.phiL0, spec.phiR0
        return GammaVector(k=k, alpha=float(params.alpha), beta=float(params.beta), phiL0=phiL0, phiR0=phiR0)
    except ValidationError as e:
        raise ConfigError(f"invalid sphere parameters: {e.errors()[0]['msg']}") from e
    except ConfigError:
        raise
    except OscillatorError as e:
        raise ConfigError(e.message) from e


def load_gamma(path: str | Path) -> GammaVector:
    """Read the sphere parameter vector (k, alpha, beta, phiL(0), phiR(0))."""
    return gamma_from_file(read_parameter_file(path))
