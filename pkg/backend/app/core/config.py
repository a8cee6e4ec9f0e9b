# backend/app/core/config.py
"""
Engine Configuration
Loads settings from a flat key = value file, environment variables and CLI flags
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings

from app.core.exceptions import ParameterError

# Spellings accepted in config files for the canonical field names.
KEY_ALIASES = {
    "u'": "uprime",
    "u_prime": "uprime",
    "characteristic": "char",
    "size-limit": "size_limit",
    "max-workers": "max_workers",
    "series-order": "series_order",
    "n": "truncation",
    "format": "output",
}


class Settings(BaseSettings):
    """Engine settings; CLI flags override the config file, which overrides the environment."""

    # Ground parameters
    level: int = 1
    char: int = 0
    u: List[str] = ["0"]
    uprime: List[str] = ["0"]

    # Limits
    size_limit: int = 8
    truncation: int = 4
    series_order: int = 0

    # Output
    output: str = "json"
    seed: int = 0
    max_workers: int = 4

    # Logging Configuration
    log_level: str = "WARNING"
    log_format: str = "json"
    log_dir: str = "logs"
    enable_file_logging: bool = False
    enable_console_logging: bool = True
    log_max_file_size: int = 10 * 1024 * 1024
    log_backup_count: int = 5

    @field_validator("u", "uprime", mode="before")
    @classmethod
    def split_scalar_list(cls, v):
        if isinstance(v, str):
            body = v.strip()
            if body.startswith("[") and body.endswith("]"):
                body = body[1:-1]
            return [item.strip() for item in body.split(",") if item.strip()]
        if isinstance(v, (list, tuple)):
            return [str(item).strip() for item in v]
        return v

    @field_validator("level", "size_limit", "max_workers", mode="after")
    @classmethod
    def require_positive(cls, v):
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("truncation", "series_order", mode="after")
    @classmethod
    def require_non_negative(cls, v):
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator("output", mode="before")
    @classmethod
    def validate_output(cls, v):
        if isinstance(v, str):
            v = v.strip().lower()
            if v not in ("json", "csv"):
                raise ValueError("output must be json or csv")
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v):
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if isinstance(v, str):
            v = v.upper()
            if v not in valid_levels:
                return "WARNING"
        return v

    def effective_series_order(self) -> int:
        return self.series_order or 2 * self.size_limit

    def to_params(self):
        from app.services.ground import make_params

        return make_params(
            self.level, self.char, self.u, self.uprime, max_order=self.effective_series_order()
        )

    class Config:
        env_prefix = "OBRAUER_"
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"


def load_config_file(path: str) -> Dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc

    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        key = KEY_ALIASES.get(key, key).replace("-", "_")
        values[key] = value.strip()
    return values


def build_settings(
    config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> Settings:
    values: Dict[str, Any] = {}
    if config_path:
        values.update(load_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        return Settings(**values)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ParameterError(f"invalid configuration: {problems}") from exc


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def configure_settings(settings: Settings) -> Settings:
    global _settings
    _settings = settings
    return settings


def reset_settings() -> None:
    global _settings
    _settings = None
