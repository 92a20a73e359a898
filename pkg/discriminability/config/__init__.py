"""Configuration management for the feature selector."""

import copy
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from jsonschema import Draft7Validator

from ..models import ConfigurationError

_POSITIVE_INT_OR_NULL = {"type": ["integer", "null"], "minimum": 1}
_FRACTION = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}

CONFIG_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "ingest": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "delimiter": {"type": "string", "minLength": 1, "maxLength": 1},
                "header": {"type": "boolean"},
            },
        },
        "selection": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "budget": {"type": ["string", "number", "null"]},
                "discard_correlated": {"type": ["integer", "null"], "minimum": 0},
                "seed": {"type": ["integer", "null"]},
            },
        },
        "approximation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "support_length": {"type": ["integer", "null"], "minimum": 2},
                "relative_length": {"anyOf": [_FRACTION, {"type": "null"}]},
                "sweep": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "start": _FRACTION,
                        "stop": _FRACTION,
                        "step": _FRACTION,
                    },
                },
            },
        },
        "scoring": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"threads": _POSITIVE_INT_OR_NULL},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["json", "yaml", "text"]},
                "indent": {"type": "integer", "minimum": 0},
            },
        },
        "bench": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rows": {"type": "integer", "minimum": 2},
                "features": {"type": "integer", "minimum": 1},
                "planted": {"type": "integer", "minimum": 0},
                "seeds": {"type": "integer", "minimum": 1},
                "relative_length": _FRACTION,
            },
        },
        "logging": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "level": {"enum": ["DEBUG", "INFO", "WARNING", "ERROR"]},
            },
        },
    },
}

DEFAULTS: Dict[str, Any] = {
    "ingest": {
        "delimiter": ",",
        "header": True,
    },
    "selection": {
        "budget": "10%",
        "discard_correlated": None,
        "seed": 0,
    },
    "approximation": {
        "support_length": None,
        "relative_length": None,
        "sweep": {"start": 0.01, "stop": 0.2, "step": 0.01},
    },
    "scoring": {
        "threads": None,
    },
    "output": {
        "format": "json",
        "indent": 2,
    },
    "bench": {
        "rows": 10000,
        "features": 50,
        "planted": 5,
        "seeds": 5,
        "relative_length": 0.1,
    },
    "logging": {
        "level": "WARNING",
    },
}


def schema_issues(config_dict: Dict[str, Any]) -> List[str]:
    """Validate a configuration dictionary against CONFIG_SCHEMA.

    Returns:
        One message per violation, prefixed with its key path
    """
    validator = Draft7Validator(CONFIG_SCHEMA)
    issues = []
    for error in sorted(validator.iter_errors(config_dict), key=lambda e: list(e.path)):
        path = ".".join(str(part) for part in error.path) or "<root>"
        issues.append(f"{path}: {error.message}")
    return issues


class SelectorConfig:
    """Configuration for feature selection runs."""

    def __init__(self, config_dict: Optional[Dict[str, Any]] = None):
        """Initialize configuration.

        Args:
            config_dict: Configuration dictionary; missing keys take defaults
        """
        self.config = copy.deepcopy(config_dict) if config_dict else {}
        issues = schema_issues(self.config)
        if issues:
            raise ConfigurationError("Invalid configuration: " + "; ".join(issues))
        self._load_defaults()

    def _load_defaults(self) -> None:
        """Fill missing sections and keys from DEFAULTS."""
        for key, value in DEFAULTS.items():
            if key not in self.config:
                self.config[key] = copy.deepcopy(value)
            elif isinstance(value, dict) and isinstance(self.config[key], dict):
                for nested_key, nested_value in value.items():
                    if nested_key not in self.config[key]:
                        self.config[key][nested_key] = copy.deepcopy(nested_value)

    @classmethod
    def from_file(cls, config_path: str) -> "SelectorConfig":
        """Load configuration from a YAML file."""
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_file, "r", encoding="utf-8") as f:
            try:
                config_dict = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Cannot parse {config_path}: {e}") from e

        if config_dict is not None and not isinstance(config_dict, dict):
            raise ConfigurationError(f"{config_path} must contain a mapping")
        return cls(config_dict)

    @classmethod
    def create_default(cls) -> "SelectorConfig":
        return cls({})

    def get_delimiter(self) -> str:
        return self.config["ingest"]["delimiter"]

    def has_header(self) -> bool:
        return bool(self.config["ingest"]["header"])

    def get_budget(self) -> Any:
        return self.config["selection"]["budget"]

    def get_discard_correlated(self) -> Optional[int]:
        return self.config["selection"]["discard_correlated"]

    def get_seed(self) -> Optional[int]:
        return self.config["selection"]["seed"]

    def get_support_length(self) -> Optional[int]:
        return self.config["approximation"]["support_length"]

    def get_relative_length(self) -> Optional[float]:
        return self.config["approximation"]["relative_length"]

    def get_sweep_lengths(self) -> List[float]:
        """Relative lengths start, start+step, ..., stop (rounded to the step's precision)."""
        sweep = self.config["approximation"]["sweep"]
        start, stop, step = sweep["start"], sweep["stop"], sweep["step"]
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 10) for i in range(count)]

    def get_threads(self) -> Optional[int]:
        return self.config["scoring"]["threads"]

    def get_output_config(self) -> Dict[str, Any]:
        return self.config["output"]

    def get_bench_config(self) -> Dict[str, Any]:
        return self.config["bench"]

    def get_log_level(self) -> str:
        return self.config["logging"]["level"]

    def validate(self) -> List[str]:
        """Return human-readable problems with the current configuration."""
        issues = schema_issues(self.config)
        sweep = self.config["approximation"]["sweep"]
        if sweep["start"] > sweep["stop"]:
            issues.append("approximation.sweep: start exceeds stop")
        bench = self.config["bench"]
        if bench["planted"] > bench["features"]:
            issues.append("bench: planted exceeds features")
        return issues

    def save_to_file(self, config_path: str) -> None:
        """Save configuration to a YAML file."""
        with open(config_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.config, f, default_flow_style=False, indent=2)


DEFAULT_CONFIG_TEMPLATE = """
# Feature selector configuration
# Command-line flags override these values.

ingest:
  delimiter: ","
  header: true

selection:
  budget: "10%"            # count, percentage or fraction of all features
  discard_correlated: null # features to discard by correlation first (FSDC)
  seed: 0                  # random baseline only

approximation:
  support_length: null     # requested support-sequence length l
  relative_length: null    # or l = floor(r * n)
  sweep:
    start: 0.01
    stop: 0.2
    step: 0.01

scoring:
  threads: null            # null = all available CPUs

output:
  format: "json"           # json, yaml, text
  indent: 2

bench:
  rows: 10000
  features: 50
  planted: 5
  seeds: 5
  relative_length: 0.1

logging:
  level: "WARNING"
"""


def create_default_config_file(file_path: str) -> None:
    """Write the commented default configuration template."""
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(DEFAULT_CONFIG_TEMPLATE.strip() + "\n")
