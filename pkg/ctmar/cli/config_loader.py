"""RunConfig assembly: model defaults < --config file (TOML or JSON) < command-line flags."""
from __future__ import annotations

import json
import logging
import tomllib
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ctmar.errors import ConfigError
from ctmar.models.run_config import RunConfig

logger = logging.getLogger(__name__)


def read_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        elif path.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            raise ConfigError(f"config file {path} must be .toml or .json")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path}: root must be a table/object")
    return data


def merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; override values win, None overrides are ignored"""
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        elif isinstance(value, dict):
            merged[key] = merge({}, value)
        else:
            merged[key] = value
    return merged


def load_run_config(config_path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    data = read_config_file(config_path) if config_path else {}
    data = merge(data, overrides or {})
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    spectrum_path = config.simulation.spectrum_path
    if spectrum_path is not None and not Path(spectrum_path).is_file():
        raise ConfigError(f"spectrum file does not exist: {spectrum_path}")
    logger.debug("Effective configuration hash %s", config.config_hash())
    return config
