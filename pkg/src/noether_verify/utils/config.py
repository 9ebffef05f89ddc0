"""Configuration management for noether-verify."""

import copy
import os
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

# Environment variables that override configuration values
ENV_OVERRIDES = {
    "NOETHER_COLOR": ("output", "color"),
    "NOETHER_WORKERS": ("verify", "workers"),
    "NOETHER_LOG_LEVEL": ("logging", "level"),
}


def parse_color(raw: str) -> bool | str:
    """``auto`` stays as is; anything else reads as a boolean."""
    if raw.strip().lower() == "auto":
        return "auto"
    return raw.strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Configuration manager that loads from YAML and environment variables."""

    DEFAULT_CONFIG = {
        "verify": {
            "workers": 4,
            "oracle_points": 20,
            "oracle_seed": 0,
            "residual_terms": 50,
        },
        "property": {
            "trials": 100,
            "seed": 0,
            "max_order": 3,
            "max_degree": 2,
            "max_base_dim": 3,
            "max_terms": 4,
        },
        "output": {
            "format": "text",
            # true, false, or auto: only when stdout is a terminal
            "color": "auto",
        },
        "logging": {
            "level": "WARNING",
            "file": None,
        },
    }

    def __init__(self, config_path: str | Path | None = None):
        """Initialize configuration.

        Args:
            config_path: Path to YAML config file. If None, uses default locations.
        """
        load_dotenv()
        self._config = self._load_config(config_path)
        self._resolve_env_vars()
        self._expand_paths()
        self._validate()

    def _load_config(self, config_path: str | Path | None) -> dict[str, Any]:
        """Load configuration from file or use defaults."""
        config = copy.deepcopy(self.DEFAULT_CONFIG)

        if config_path is None:
            locations = [
                Path.cwd() / "config" / "config.yaml",
                Path.home() / ".noether-verify" / "config.yaml",
            ]
            for loc in locations:
                if loc.exists():
                    config_path = loc
                    break

        if config_path and Path(config_path).exists():
            with open(config_path) as f:
                user_config = yaml.safe_load(f) or {}
            config = self._deep_merge(config, user_config)

        return config

    def _deep_merge(self, base: dict, override: dict) -> dict:
        """Deep merge two dictionaries."""
        result = base.copy()
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def _resolve_env_vars(self) -> None:
        """Apply NOETHER_* environment overrides on top of file values."""
        for env_var, (section, key) in ENV_OVERRIDES.items():
            raw = os.getenv(env_var)
            if raw is None or raw == "":
                continue
            default = self.DEFAULT_CONFIG[section][key]
            if key == "color":
                value: Any = parse_color(raw)
            elif isinstance(default, int):
                value = int(raw)
            else:
                value = raw
            self._config[section][key] = value

    def _validate(self) -> None:
        """Reject values the verifier cannot run with.

        Raises:
            ValueError: Non-positive counts, negative oracle settings or an unknown output format
        """
        verify = self._config["verify"]
        prop = self._config["property"]
        for section, key in ((verify, "workers"), (verify, "residual_terms"), (prop, "trials"), (prop, "max_base_dim")):
            if int(section[key]) < 1:
                raise ValueError(f"Config value {key} must be positive, got {section[key]}")
        for section, key in ((verify, "oracle_points"), (prop, "max_order"), (prop, "max_degree"), (prop, "max_terms")):
            if int(section[key]) < 0:
                raise ValueError(f"Config value {key} must be non-negative, got {section[key]}")
        if self._config["output"].get("format") not in ("text", "json"):
            raise ValueError(f"Unknown output format in config: {self._config['output'].get('format')!r}")
        color = self._config["output"].get("color")
        if not isinstance(color, bool) and color != "auto":
            raise ValueError(f"output.color must be true, false or auto, got {color!r}")

    def _expand_paths(self) -> None:
        """Expand ~ in path configurations."""
        log_file = self._config["logging"].get("file")
        if log_file:
            self._config["logging"]["file"] = str(Path(log_file).expanduser())

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value using dot notation.

        Args:
            key: Configuration key in dot notation (e.g., "verify.workers")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        keys = key.split(".")
        value = self._config
        try:
            for k in keys:
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    def __getitem__(self, key: str) -> Any:
        """Get a top-level configuration section."""
        return self._config[key]

    @property
    def verify(self) -> dict[str, Any]:
        """Get verification configuration."""
        return self._config["verify"]

    @property
    def property_suite(self) -> dict[str, Any]:
        """Get property-suite configuration."""
        return self._config["property"]

    @property
    def output(self) -> dict[str, Any]:
        """Get output configuration."""
        return self._config["output"]

    @property
    def logging(self) -> dict[str, Any]:
        """Get logging configuration."""
        return self._config["logging"]
