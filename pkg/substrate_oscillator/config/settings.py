"""Configuration settings using Pydantic."""

import math
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SUBSTRATE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Integration
    rel_tol: float = Field(default=1e-9, gt=0, description="Relative integration tolerance")
    abs_tol: float = Field(default=1e-11, gt=0, description="Absolute integration tolerance")
    max_step: float = Field(default=math.inf, gt=0, description="Largest integrator step")
    stiff_switch: bool = Field(
        default=True, description="Fall back to an implicit method when explicit stepping stalls"
    )
    nfev_budget: int = Field(
        default=400_000, ge=1000, description="Explicit-method evaluations before the stiff switch"
    )

    # Return maps and cycles
    return_t_max: float = Field(default=1e4, gt=0, description="Give-up time for section returns")
    cycle_max_iter: int = Field(default=40, ge=1, description="Fixed-point iterations for cycles")
    cycle_tol: float = Field(default=1e-8, gt=0, description="Fixed-point tolerance on sections")
    multiplier_step: float = Field(
        default=1e-6, gt=0, description="Relative step of the return-map finite difference"
    )

    # Equilibria
    equilibrium_grid: int = Field(default=20, ge=2, description="Multi-start grid per axis")
    dedup_radius: float = Field(default=1e-6, gt=0, description="Equilibrium merge radius")
    newton_tol: float = Field(default=1e-10, gt=0, description="Equilibrium residual tolerance")

    # Sigmoids
    tail_z0: float = Field(default=1e3, gt=0, description="Tail validity threshold |z| > Z0")

    # Heteroclinic shooting
    shooting_tol: float = Field(default=1e-8, gt=0, description="Bisection tolerance in eta1")
    shooting_rel_tol: float = Field(
        default=1e-10, gt=0, description="Relative integration tolerance for shooting"
    )
    seed_offset: float = Field(default=1e-2, gt=0, description="Manifold seed offset")
    seed_refinements: int = Field(default=4, ge=1, description="Seed halvings before giving up")
    section_fraction: float = Field(
        default=0.95, gt=0, lt=1, description="Section abscissa as a fraction of q_w's r4"
    )
    escape_radius: float = Field(default=1e3, gt=0, description="Box radius for escaping orbits")
    bracket_deep: float = Field(default=5.0, gt=0, description="Deep bracket offset")
    bracket_near: float = Field(default=0.05, gt=0, description="Near bracket offset")
    bracket_widenings: int = Field(default=3, ge=0, description="Bracket widenings on failure")

    # Regime classification
    near_tube_radius: float = Field(default=0.1, gt=0, description="Tube radius around Gamma_0")
    hausdorff_samples: int = Field(default=1000, ge=10, description="Points per resampled curve")

    # Output
    output_dir: str = Field(default="output", description="Directory for CSV/JSON artifacts")
    float_digits: int = Field(default=17, ge=1, le=17, description="Significant digits written")
    seed: int = Field(default=0, ge=0, description="Seed for randomized checks")

    @field_validator("max_step", mode="before")
    @classmethod
    def parse_max_step(cls, v: Optional[str | float]) -> float:
        """Accept 'inf' or an empty value for an unbounded step."""
        if v is None or (isinstance(v, str) and v.strip().lower() in ("", "inf", "none")):
            return math.inf
        return float(v)


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
