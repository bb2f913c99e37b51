import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, field_validator

from errors import ConfigError

# Pick up a local .env before anything reads the environment
load_dotenv()


class Settings(BaseModel):
    """Runtime settings for the toolkit"""
    max_dim: int = 4
    workers: int = 1
    seed: int = 20240601
    sample_attempts: int = 25
    search_height: int = 3
    log_level: str = "WARNING"

    @field_validator("max_dim", "workers", "sample_attempts", "search_height")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value}")
        return value


ENV_KEYS = {
    "max_dim": "PDO_MAX_DIM",
    "workers": "PDO_WORKERS",
    "seed": "PDO_SEED",
    "sample_attempts": "PDO_SAMPLE_ATTEMPTS",
    "search_height": "PDO_SEARCH_HEIGHT",
    "log_level": "PDO_LOG_LEVEL",
}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read settings from the environment (cached)"""
    raw = {field: os.getenv(key) for field, key in ENV_KEYS.items()}
    raw = {field: value for field, value in raw.items() if value not in (None, "")}
    try:
        return Settings(**raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
