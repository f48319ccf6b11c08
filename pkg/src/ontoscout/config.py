"""Configuration resolution: CLI flag > environment variable > config file >
built-in default. Environment variables use the ONTOSCOUT_ prefix; the
config file is JSON with the same keys as the CLI flags (snake_case).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError

ENV_PREFIX = "ONTOSCOUT_"


@dataclass
class Config:
    ontology_path: str | None = None
    data_path: str | None = None
    endpoint_url: str | None = None
    index_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8040
    dimension: int = 256
    leaf_count: int | None = None  # None = max(2, ceil(sqrt(class count)))
    embedder: str = "offline"  # offline | remote
    embedder_url: str | None = None
    embedder_model: str | None = None
    labeler: str = "offline"  # offline | remote
    labeler_url: str | None = None
    timeout: float = 30.0
    connection_cap: int = 10
    default_limit: int = 12
    max_get_length: int = 1500
    subclass_closure: bool = False
    cors_origin: str | None = None
    auth_token: str | None = None  # required from API callers when set
    endpoint_token: str | None = None  # bearer token sent to the SPARQL endpoint

    def validate_for_build(self) -> None:
        if not self.ontology_path:
            raise ConfigError("ontology path is required for build")
        if not Path(self.ontology_path).exists():
            raise ConfigError(f"ontology path does not exist: {self.ontology_path}")
        has_data = bool(self.data_path)
        has_endpoint = bool(self.endpoint_url)
        if has_data == has_endpoint:
            raise ConfigError("exactly one of data path or endpoint URL is required")
        if has_data and not Path(self.data_path).exists():
            raise ConfigError(f"instance data path does not exist: {self.data_path}")
        if not self.index_path:
            raise ConfigError("index output path is required for build")
        if self.embedder not in ("offline", "remote"):
            raise ConfigError(f"unknown embedder mode {self.embedder!r}")
        if self.embedder == "remote" and not self.embedder_url:
            raise ConfigError("remote embedder requires an embedder URL")
        if self.labeler not in ("offline", "remote"):
            raise ConfigError(f"unknown labeler mode {self.labeler!r}")
        if self.labeler == "remote" and not self.labeler_url:
            raise ConfigError("remote labeler requires a labeler URL")
        if self.dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.dimension}")

    def validate_for_serve(self) -> None:
        if not self.index_path:
            raise ConfigError("index path is required for serve")
        if not Path(self.index_path).exists():
            raise ConfigError(f"index path does not exist: {self.index_path}")
        if not self.endpoint_url:
            raise ConfigError("endpoint URL is required for serve")


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, value: Any, target_type: type) -> Any:
    if value is None:
        return None
    if target_type is bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _BOOL_TRUE:
            return True
        if text in _BOOL_FALSE:
            return False
        raise ConfigError(f"cannot parse boolean {name}={value!r}")
    try:
        return target_type(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse {name}={value!r}: {exc}") from None


_FIELD_TYPES: dict[str, type] = {
    "port": int,
    "dimension": int,
    "leaf_count": int,
    "timeout": float,
    "connection_cap": int,
    "default_limit": int,
    "max_get_length": int,
    "subclass_closure": bool,
}


def resolve_config(
    cli_values: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_file: str | None = None,
) -> Config:
    """Merge the three sources under the documented precedence."""
    env = env if env is not None else os.environ
    file_values: dict[str, Any] = {}
    if config_file:
        try:
            file_values = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_file}") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_file}: {exc}") from None
        if not isinstance(file_values, dict):
            raise ConfigError("config file must contain a JSON object")

    config = Config()
    for field_def in fields(Config):
        name = field_def.name
        target = _FIELD_TYPES.get(name, str)
        value: Any = None
        if cli_values and cli_values.get(name) is not None:
            value = cli_values[name]
        elif (env_value := env.get(ENV_PREFIX + name.upper())) is not None:
            value = env_value
        elif name in file_values and file_values[name] is not None:
            value = file_values[name]
        if value is not None:
            setattr(config, name, _coerce(name, value, target))
    return config
