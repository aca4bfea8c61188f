"""Configuration management for hamlow."""

import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from .errors import InvalidParameterError

CONFIG_DIR = Path(os.environ.get("HAMLOW_HOME", Path.home() / ".hamlow"))
CONFIG_FILE = CONFIG_DIR / "config.yaml"

ORACLE_CAP_ENV = "HAMLOW_ORACLE_CAP"

DEFAULT_ORACLE_CAP = 14
DEFAULT_VECTOR_CAP = 24
DEFAULT_WORKERS = 1
DEFAULT_SEED = 0

KNOWN_KEYS = ("oracle_cap", "vector_cap", "workers", "seed")


def ensure_config_dir() -> None:
    """Ensure the config directory exists."""
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)


def load_config() -> dict:
    """Load configuration from file."""
    if not CONFIG_FILE.exists():
        return {}
    with open(CONFIG_FILE, "r") as f:
        return yaml.safe_load(f) or {}


def save_config(config: dict) -> None:
    """Save configuration to file."""
    ensure_config_dir()
    with open(CONFIG_FILE, "w") as f:
        yaml.dump(config, f, default_flow_style=False)


def get_value(key: str) -> Optional[Any]:
    """Get a configuration value."""
    return load_config().get(key)


def set_value(key: str, value: Any) -> None:
    """Set a configuration value."""
    if key not in KNOWN_KEYS:
        raise InvalidParameterError(f"Unknown config key: {key}")
    config = load_config()
    config[key] = value
    save_config(config)


def _positive_int(raw: Any, source: str) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{source} must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidParameterError(f"{source} must be positive, got {value}")
    return value


def get_oracle_cap(override: Optional[int] = None) -> int:
    """Largest qubit count for dense 2^n x 2^n matrices.

    An explicit override (the --oracle-cap flag) wins over the environment variable,
    which wins over the config file.
    """
    if override is not None:
        return _positive_int(override, "oracle cap")
    env = os.environ.get(ORACLE_CAP_ENV)
    if env:
        return _positive_int(env, ORACLE_CAP_ENV)
    stored = get_value("oracle_cap")
    if stored is not None:
        return _positive_int(stored, "oracle_cap")
    return DEFAULT_ORACLE_CAP


def get_vector_cap() -> int:
    """Largest total qubit count for explicit statevectors (the 2n-qubit register)."""
    stored = get_value("vector_cap")
    return _positive_int(stored, "vector_cap") if stored is not None else DEFAULT_VECTOR_CAP


def get_workers() -> int:
    stored = get_value("workers")
    return _positive_int(stored, "workers") if stored is not None else DEFAULT_WORKERS


def get_seed() -> int:
    stored = get_value("seed")
    return int(stored) if stored is not None else DEFAULT_SEED


def load_run_config(path: Optional[str]) -> Dict[str, Any]:
    """Load a run config file. JSON documents parse as YAML too."""
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise InvalidParameterError(f"Run config {path} must contain a mapping")
    return data


def resolve_run_config(file_config: Mapping[str, Any], flags: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge a run config with command-line flags. Flags that were given win."""
    resolved = dict(file_config)
    for key, value in flags.items():
        if value is None:
            continue
        if isinstance(value, (tuple, list)) and not value and key in resolved:
            continue
        resolved[key] = list(value) if isinstance(value, tuple) else value
    return resolved


def settings() -> Dict[str, Any]:
    """Resolved settings, for display and for embedding in reports."""
    return {
        "oracle_cap": get_oracle_cap(),
        "vector_cap": get_vector_cap(),
        "workers": get_workers(),
        "seed": get_seed(),
    }
