"""
Configuration management for laboratory experiments.
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pydantic
import yaml

from ..models.config import ExperimentConfig
from ..utils.error_handling import ValidationError
from ..utils.logging import get_logger

logger = get_logger("config")


class ConfigurationManager:
    """Loads, merges and validates experiment configuration."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to a JSON or YAML config file. If None, the
                experiment is configured from flags alone.
        """
        self.config_path = config_path
        self._config: Optional[ExperimentConfig] = None
        self.conflicts: List[str] = []

    def load_raw(self) -> Dict[str, Any]:
        """
        Read the config file.

        Raises:
            ValidationError: If the file is missing, unreadable or not a mapping.
        """
        if self.config_path is None:
            return {}
        if not os.path.exists(self.config_path):
            raise ValidationError([f"Configuration file not found: {self.config_path}"])

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                if self.config_path.endswith(".json"):
                    raw_config = json.load(f)
                else:
                    raw_config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ValidationError([f"Invalid YAML in configuration file: {e}"])
        except json.JSONDecodeError as e:
            raise ValidationError([f"Invalid JSON in configuration file: {e}"])

        if raw_config is None:
            return {}
        if not isinstance(raw_config, dict):
            raise ValidationError(["Configuration file must contain a mapping"])

        missing: List[str] = []
        expanded = self._expand_env_vars(raw_config, missing)
        if missing:
            raise ValidationError(
                [f"Environment variable {name} is not set" for name in sorted(set(missing))]
            )
        return expanded

    def _expand_env_vars(self, obj: Any, missing: List[str]) -> Any:
        """Recursively expand ${VAR_NAME} placeholders."""
        if isinstance(obj, dict):
            return {key: self._expand_env_vars(value, missing) for key, value in obj.items()}
        elif isinstance(obj, list):
            return [self._expand_env_vars(item, missing) for item in obj]
        elif isinstance(obj, str):
            if obj.startswith("${") and obj.endswith("}"):
                var_name = obj[2:-1]
                env_value = os.getenv(var_name)
                if env_value is None:
                    missing.append(var_name)
                    return obj
                return yaml.safe_load(env_value)
            return obj
        else:
            return obj

    def merge_flags(
        self, raw_config: Dict[str, Any], flags: Optional[Dict[str, Any]]
    ) -> Tuple[Dict[str, Any], List[str]]:
        """
        Overlay command-line flags under the file: file values win, and each
        disagreeing key is logged as a warning.
        """
        conflicts: List[str] = []
        merged = self._merge(raw_config, flags or {}, "", conflicts)
        return merged, conflicts

    def _merge(
        self, file_values: Dict[str, Any], flags: Dict[str, Any], prefix: str, conflicts: List[str]
    ) -> Dict[str, Any]:
        merged = dict(file_values)
        for key, value in flags.items():
            if value is None:
                continue
            path = f"{prefix}{key}"
            if key not in merged:
                merged[key] = value
            elif isinstance(merged[key], dict) and isinstance(value, dict):
                merged[key] = self._merge(merged[key], value, f"{path}.", conflicts)
            elif merged[key] != value:
                conflicts.append(path)
                logger.warning(
                    "Config file value overrides command-line flag",
                    extra={"key": path, "file": merged[key], "flag": value},
                )
        return merged

    def load_config(
        self, flags: Optional[Dict[str, Any]] = None, command: Optional[str] = None
    ) -> ExperimentConfig:
        """
        Load, merge and validate the configuration.

        Args:
            flags: Command-line values (None entries are ignored)
            command: Subcommand whose required fields are checked

        Returns:
            Validated ExperimentConfig.

        Raises:
            ValidationError: Listing every problem found.
        """
        raw_config, self.conflicts = self.merge_flags(self.load_raw(), flags)
        try:
            config = ExperimentConfig.model_validate(raw_config)
        except pydantic.ValidationError as e:
            raise ValidationError(
                [
                    f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
                    for err in e.errors()
                ]
            ) from e

        if command is not None:
            missing = config.requirements(command)
            if missing:
                raise ValidationError(missing)

        self._config = config
        logger.info(
            "Configuration loaded",
            extra={"path": self.config_path, "command": command, "conflicts": self.conflicts},
        )
        return config

    def get_config(self) -> ExperimentConfig:
        """Get the current configuration, loading it if necessary."""
        if self._config is None:
            return self.load_config()
        return self._config

    @staticmethod
    def schema() -> Dict[str, Any]:
        return ExperimentConfig.model_json_schema()

    @classmethod
    def write_schema(cls, path: str) -> Path:
        """Write the JSON schema of ExperimentConfig."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(cls.schema(), indent=2, sort_keys=True) + "\n")
        return target
