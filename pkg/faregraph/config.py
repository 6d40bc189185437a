"""
Configuration module for faregraph
Reads every knob from the environment (with .env support) into one Settings object
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from faregraph.errors import ConfigurationError

# Load environment variables
load_dotenv()

_TRUE = {"1", "true", "yes", "on"}


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


def _env_bool(name, default):
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    return raw.strip().lower() in _TRUE


@dataclass(frozen=True)
class Settings:
    """Runtime settings shared by the CLI, the service and the checkers"""

    budget_edges: int = 7
    budget_segments: int = 3
    budget_elongation: int = 2
    seed: int = 0
    state_limit: int = 200_000
    walk_limit: Optional[int] = None
    forbid_virtual_endpoints: bool = False
    compact: bool = False
    log_level: str = "INFO"
    service_name: str = "fare-service"
    service_port: int = 8010

    def __post_init__(self):
        for name in ("budget_edges", "budget_segments", "state_limit"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.budget_elongation < 0:
            raise ConfigurationError("budget_elongation must be nonnegative")
        if self.walk_limit is not None and self.walk_limit < 1:
            raise ConfigurationError("walk_limit must be positive")

    def with_overrides(self, **overrides):
        """
        Copy of these settings with the non-None overrides applied

        Args:
            **overrides: Field values; None means "keep the current value"

        Returns:
            Settings
        """
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


def get_settings(**overrides):
    """
    Build Settings from environment variables

    Args:
        **overrides: Field values taking precedence over the environment

    Returns:
        Settings instance
    """
    walk_limit = _env_int("FAREGRAPH_WALK_LIMIT", 0)
    settings = Settings(
        budget_edges=_env_int("FAREGRAPH_BUDGET_EDGES", 7),
        budget_segments=_env_int("FAREGRAPH_BUDGET_SEGMENTS", 3),
        budget_elongation=_env_int("FAREGRAPH_BUDGET_ELONGATION", 2),
        seed=_env_int("FAREGRAPH_SEED", 0),
        state_limit=_env_int("FAREGRAPH_STATE_LIMIT", 200_000),
        walk_limit=walk_limit or None,
        forbid_virtual_endpoints=_env_bool("FAREGRAPH_FORBID_VIRTUAL_ENDPOINTS", False),
        compact=_env_bool("FAREGRAPH_COMPACT", False),
        log_level=os.getenv("FAREGRAPH_LOG_LEVEL", "INFO").upper(),
        service_name=os.getenv("SERVICE_NAME", "fare-service"),
        service_port=_env_int("SERVICE_PORT", 8010),
    )
    return settings.with_overrides(**overrides)


def configure_logging(settings=None):
    """Install a single stream handler at the configured level"""
    settings = settings or get_settings()
    level = getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("faregraph").setLevel(level)
