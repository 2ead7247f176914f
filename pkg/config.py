"""
Configuration for the geometric local search toolkit.
Values come from the environment (optionally a .env file) and are validated once.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from errors import InvalidParams

load_dotenv()


class Settings(BaseModel):
    log_level: str = Field("INFO", description="Root log level")
    log_file: Optional[str] = Field(None, description="Optional log file path")
    log_format: str = Field("text", description="'text' or 'json'")

    alpha: float = Field(1.0, gt=0, description="Constant in b = ceil(alpha / epsilon^2)")
    max_b: int = Field(4, ge=1, description="Hard cap on the swap size derived from epsilon")
    cap_factor: int = Field(4, ge=1, description="Second-loop cap is cap_factor * n^2")

    retry_budget: int = Field(1000, ge=1, description="Rejection-sampling retries per object")
    grid_denominator: int = Field(64, ge=1, le=2 ** 16, description="Denominator of coordinate grids")

    oracle_max_n: int = Field(24, ge=1)
    oracle_max_nodes: int = Field(2_000_000, ge=1)
    oracle_time_limit: float = Field(60.0, gt=0)

    bench_workers: int = Field(1, ge=1)

    api_host: str = "0.0.0.0"
    api_port: int = 8000

    @field_validator("log_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        value = value.lower()
        if value not in ("text", "json"):
            raise ValueError("LOG_FORMAT must be 'text' or 'json'")
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from environment variables, ignoring unset ones."""
        env_map = {
            "log_level": "LOG_LEVEL",
            "log_file": "LOG_FILE",
            "log_format": "LOG_FORMAT",
            "alpha": "LS_ALPHA",
            "max_b": "LS_MAX_B",
            "cap_factor": "LS_CAP_FACTOR",
            "retry_budget": "GEN_RETRY_BUDGET",
            "grid_denominator": "GEN_GRID_DENOMINATOR",
            "oracle_max_n": "ORACLE_MAX_N",
            "oracle_max_nodes": "ORACLE_MAX_NODES",
            "oracle_time_limit": "ORACLE_TIME_LIMIT",
            "bench_workers": "BENCH_WORKERS",
            "api_host": "API_HOST",
            "api_port": "API_PORT",
        }
        values = {}
        for field_name, var in env_map.items():
            raw = os.getenv(var)
            if raw is not None and raw != "":
                values[field_name] = raw
        try:
            return cls(**values)
        except ValidationError as e:
            raise InvalidParams(f"Invalid environment configuration: {e}") from e


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()
