"""
Runtime settings for ambistop
Values come from the environment (optionally a .env file) with safe defaults
"""

import logging
import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, str(default)))


class Settings(BaseModel):
    log_level: str = Field(default_factory=lambda: os.getenv("AMBISTOP_LOG_LEVEL", "INFO"))
    seed: int = Field(default_factory=lambda: _env_int("AMBISTOP_SEED", 20240601))

    # Monte Carlo defaults
    mc_paths: int = Field(default_factory=lambda: _env_int("AMBISTOP_MC_PATHS", 100000))
    mc_dt: float = Field(default_factory=lambda: _env_float("AMBISTOP_MC_DT", 1e-3))
    mc_horizon: float = Field(default_factory=lambda: _env_float("AMBISTOP_MC_HORIZON", 200.0))
    mc_workers: int = Field(default_factory=lambda: _env_int("AMBISTOP_MC_WORKERS", 1))
    mc_block: int = Field(default_factory=lambda: _env_int("AMBISTOP_MC_BLOCK", 8192))

    # PDE oracle
    grid_n: int = Field(default_factory=lambda: _env_int("AMBISTOP_GRID_N", 4001))

    api_prefix: str = Field(default_factory=lambda: os.getenv("AMBISTOP_API_PREFIX", "/api"))


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


def configure_logging(settings: Optional[Settings] = None) -> None:
    """Configure the root logger once from the settings."""
    settings = settings or get_settings()
    level = getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)
