import yaml
from pathlib import Path
from typing import Dict, Any, Optional

from src.core.exceptions import ConfigurationError


class Config:
    """Configuration management"""

    @staticmethod
    def load_config(config_path: str) -> Dict[str, Any]:
        path = Path(config_path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {config_path}")
        with open(path, "r") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Invalid YAML in {config_path}: {e}")
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{config_path} must hold a mapping")
        return data

    @staticmethod
    def merge(base: Dict[str, Any], override: Optional[Dict[str, Any]]) -> Dict[str, Any]:
        """Recursively merge ``override`` into a copy of ``base``."""
        merged = dict(base)
        for key, value in (override or {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = Config.merge(merged[key], value)
            elif value is not None:
                merged[key] = value
        return merged
