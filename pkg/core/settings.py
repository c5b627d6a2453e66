"""
Toolkit Settings - Environment Configuration
============================================
Reads defaults for the command line from the environment (a .env file is
loaded by the entry point). Every value can be overridden per job by flags.

Variables:
- DBLFIB_OUTPUT_DIR: default directory for reports and corpus files
- DBLFIB_WINDOW: default provider window (max set size)
- DBLFIB_APEX: default max apex size of spans and relations
- DBLFIB_BOUND: default node bound for backtracking searches
- DBLFIB_LOG_LEVEL: logging level name
"""

import os
from typing import Mapping, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from core.errors import ConfigurationError


class Settings(BaseModel):
    """Resolved configuration values"""

    output_dir: str = "reports"
    window: int = Field(default=2, ge=0, le=4)
    apex: int = Field(default=1, ge=0, le=4)
    bound: int = Field(default=200_000, gt=0)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return value


_ENV_NAMES = {
    "output_dir": "DBLFIB_OUTPUT_DIR",
    "window": "DBLFIB_WINDOW",
    "apex": "DBLFIB_APEX",
    "bound": "DBLFIB_BOUND",
    "log_level": "DBLFIB_LOG_LEVEL",
}


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    """Build Settings from the environment, raising ConfigurationError on bad values"""
    environ = os.environ if environ is None else environ
    values = {field: environ[name] for field, name in _ENV_NAMES.items() if environ.get(name)}
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
