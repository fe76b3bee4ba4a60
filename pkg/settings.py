#!/usr/bin/env python3
"""
Configuration for sweeps, replays and the service.

Values come from an optional key=value file read with python-dotenv, then from
environment variables, and are validated by pydantic.
"""

import logging
import math
import os
from pathlib import Path
from typing import Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV = "POLYA_VERIFY_CONFIG"
THREADS_ENV = "POLYA_VERIFY_THREADS"
LOG_LEVEL_ENV = "LOG_LEVEL"


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


class VerifySettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid_na: int = Field(60, ge=1)
    grid_nb: int = Field(60, ge=1)
    b_min: float = Field(0.02, ge=1e-3)
    b_max: float = Field(math.sqrt(3.0) / 2.0, gt=0.0, le=math.sqrt(3.0) / 2.0 + 1e-12)
    series_terms: int = Field(64, ge=1)
    fem_max_level: int = Field(7, ge=4, le=9)
    cert_max_depth: int = Field(40, ge=0)
    threads: int = Field(default_factory=_default_threads, ge=1)
    log_level: str = "INFO"
    upper_sample_count: int = Field(500, ge=1)
    output_dir: str = "reports"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.strip().upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value!r}")
        return level

    @model_validator(mode="after")
    def _ordered_band(self) -> "VerifySettings":
        if self.b_min >= self.b_max:
            raise ValueError(f"b_min ({self.b_min}) must be below b_max ({self.b_max})")
        return self


def load_settings(path: Optional[Union[str, Path]] = None) -> VerifySettings:
    """
    Build validated settings.

    Args:
        path: key=value file; defaults to $POLYA_VERIFY_CONFIG when set

    Returns:
        VerifySettings with file values, then environment overrides applied

    Raises:
        ConfigError: missing file, unknown key or invalid value
    """
    values = {}
    path = path or os.getenv(CONFIG_ENV)
    if path:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        for key, value in dotenv_values(path).items():
            if value is None:
                raise ConfigError(f"config key {key!r} has no value")
            values[key.strip().lower()] = value.strip()

    threads = os.getenv(THREADS_ENV)
    if threads:
        values["threads"] = threads
    log_level = os.getenv(LOG_LEVEL_ENV)
    if log_level:
        values["log_level"] = log_level

    try:
        settings = VerifySettings(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
    logger.debug(f"Settings loaded: {settings.model_dump()}")
    return settings


def with_overrides(settings: VerifySettings, **values) -> VerifySettings:
    """Copy of settings with validated overrides; None values are ignored."""
    merged = {**settings.model_dump(), **{k: v for k, v in values.items() if v is not None}}
    try:
        return VerifySettings(**merged)
    except ValidationError as e:
        raise ConfigError(f"invalid override: {e}") from e
