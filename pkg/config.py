"""
Configuration module for tabsynth.
Handles all environment variables and project settings.
"""

import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Always load .env at the very top
load_dotenv(dotenv_path=Path(__file__).parent / ".env", override=False)


# Determine environment (dev, test, prod, etc.)
ENV = os.getenv("ENV", "dev")


def _env_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}") from None


def _env_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


class SynthesisDefaults(BaseModel):
    """Default (sigma, alpha) mechanism settings used when CLI flags are omitted."""

    sigma: float = Field(0.5, ge=0)
    alpha: float = Field(0.0, ge=0)
    alpha_enabled: float = Field(0.01, gt=0)
    m: int = Field(1, ge=1)
    size_factor: float = Field(1.0, gt=0)
    seed: int = 20240101

    @classmethod
    def from_env(cls):
        return cls(
            sigma=_env_float("SYNTH_SIGMA", "0.5"),
            alpha=_env_float("SYNTH_ALPHA", "0.0"),
            alpha_enabled=_env_float("SYNTH_ALPHA_ENABLED_DEFAULT", "0.01"),
            m=_env_int("SYNTH_M", "1"),
            size_factor=_env_float("SYNTH_SIZE_FACTOR", "1.0"),
            seed=_env_int("SYNTH_SEED", "20240101"),
        )


class RuntimeConfig(BaseModel):
    """Worker pool, logging and output locations."""

    workers: int = Field(1, ge=1)
    log_dir: Path = Path("./logs")
    log_level: str = "INFO"
    output_dir: Path = Path("./output")

    @classmethod
    def from_env(cls):
        return cls(
            workers=_env_int("SYNTH_WORKERS", "1"),
            log_dir=Path(os.getenv("LOG_DIR", "./logs")),
            log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
            output_dir=Path(os.getenv("OUTPUT_DIR", "./output")),
        )


class FixtureConfig(BaseModel):
    """Settings for spectrum-driven fixture tables."""

    max_count: int = Field(50, ge=1)

    @classmethod
    def from_env(cls):
        return cls(max_count=_env_int("FIXTURE_MAX_COUNT", "50"))


# Main configuration object
class Config(BaseModel):
    """
    Main configuration class for tabsynth.
    Loads and validates all environment variables and settings.
    Supports environment selection (dev, test, prod) via ENV variable.
    """

    synthesis: SynthesisDefaults
    runtime: RuntimeConfig
    fixture: FixtureConfig
    ENV: str = ENV

    @classmethod
    def from_env(cls):
        """
        Create configuration from environment variables.
        Raises clear errors if variables are malformed.
        """
        return cls(
            synthesis=SynthesisDefaults.from_env(),
            runtime=RuntimeConfig.from_env(),
            fixture=FixtureConfig.from_env(),
        )


# Create config instance for importing in other modules
config = Config.from_env()
