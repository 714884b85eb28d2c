"""Configuration management for Unitary Dual Lab."""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, ValidationError

from ..core.exceptions import ConfigurationError
from ..logging.logger import get_logger

logger = get_logger("config.manager")


class LabConfig(BaseModel):
    """Run defaults shared by every command."""

    paths: int = Field(10_000, ge=1, description="Monte Carlo sample paths")
    dt: float = Field(0.01, gt=0, description="Simulation step size")
    seed: int = Field(20240611, ge=0, lt=2**64, description="Master seed")
    scheme: Literal["geodesic", "euler-renorm"] = Field("geodesic", description="Stepping scheme")
    workers: int = Field(1, ge=1, description="Simulation worker threads")
    chunk_size: int = Field(32, ge=1, description="Paths advanced together")
    max_states: int = Field(100_000, ge=1, description="Closure state budget")
    rtol: float = Field(1e-10, gt=0, description="Propagation relative tolerance")
    dense_crossover: int = Field(2000, ge=1, description="Largest dense-exponential system")
    log_level: str = Field("WARNING", description="Logging level")
    json_logs: bool = Field(False, description="Emit JSON log records")


class ConfigManager:
    """Layers configuration sources into one validated :class:`LabConfig`.

    Priority, lowest first: defaults, the saved JSON file, a YAML file in the
    working directory, an explicit ``--config`` file, ``UDL_*`` environment
    variables. Command-line flags are applied on top by the caller.
    """

    DEFAULT_CONFIG_DIR = Path.home() / ".unitary_dual_lab"
    DEFAULT_CONFIG_FILE = "config.json"
    ENV_FILE = ".env"
    YAML_CONFIG_FILES = ["udl.yaml", "udl.yml"]
    ENV_MAPPINGS = {
        "UDL_PATHS": "paths",
        "UDL_DT": "dt",
        "UDL_SEED": "seed",
        "UDL_SCHEME": "scheme",
        "UDL_WORKERS": "workers",
        "UDL_CHUNK_SIZE": "chunk_size",
        "UDL_MAX_STATES": "max_states",
        "UDL_RTOL": "rtol",
        "UDL_DENSE_CROSSOVER": "dense_crossover",
        "UDL_LOG_LEVEL": "log_level",
    }
    YAML_SECTIONS = {
        "simulation": ["paths", "dt", "seed", "scheme", "workers", "chunk_size"],
        "solver": ["max_states", "rtol", "dense_crossover"],
    }

    def __init__(self, config_dir: Optional[Path] = None, config_file: Optional[str] = None):
        """Initialize configuration manager.

        Args:
            config_dir: Directory of the saved JSON configuration
            config_file: Explicit YAML, JSON or ``key=value`` file

        Raises:
            ConfigurationError: If ``config_file`` does not exist
        """
        self.config_dir = Path(config_dir) if config_dir else self.DEFAULT_CONFIG_DIR
        self.config_file = self.config_dir / self.DEFAULT_CONFIG_FILE
        self.yaml_config_file: Optional[Path] = None
        self.explicit_file: Optional[Path] = None
        self.config: Optional[LabConfig] = None
        self.sources: List[str] = []

        for yaml_file in self.YAML_CONFIG_FILES:
            if Path(yaml_file).exists():
                self.yaml_config_file = Path(yaml_file)
                break

        if config_file:
            self.explicit_file = Path(config_file)
            if not self.explicit_file.exists():
                raise ConfigurationError(f"configuration file not found: {config_file}")

        load_dotenv(self.ENV_FILE)

    def _read_yaml(self, path: Path) -> Dict[str, Any]:
        try:
            with open(path) as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"cannot read YAML config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"YAML config {path} must be a mapping")

        values: Dict[str, Any] = {}
        for section, keys in self.YAML_SECTIONS.items():
            section_data = data.get(section) or {}
            values.update({key: section_data[key] for key in keys if key in section_data})
        logging_section = data.get("logging") or {}
        if "level" in logging_section:
            values["log_level"] = logging_section["level"]
        if "json" in logging_section:
            values["json_logs"] = logging_section["json"]
        # flat keys are accepted as well
        values.update({k: v for k, v in data.items() if k in LabConfig.model_fields})
        return values

    def _read_json(self, path: Path) -> Dict[str, Any]:
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read JSON config {path}: {e}") from e
        return {k: v for k, v in data.items() if k in LabConfig.model_fields}

    def _read_key_values(self, path: Path) -> Dict[str, Any]:
        values: Dict[str, Any] = {}
        for key, value in dotenv_values(path).items():
            if value is None:
                continue
            name = self.ENV_MAPPINGS.get(key.upper(), key.lower())
            if name not in LabConfig.model_fields:
                raise ConfigurationError(f"unknown configuration key {key!r} in {path}")
            values[name] = value
        return values

    def _read_file(self, path: Path) -> Dict[str, Any]:
        suffix = path.suffix.lower()
        if suffix in (".yaml", ".yml"):
            return self._read_yaml(path)
        if suffix == ".json":
            return self._read_json(path)
        return self._read_key_values(path)

    def load(self) -> LabConfig:
        """Load and validate the layered configuration.

        Returns:
            Loaded configuration

        Raises:
            ConfigurationError: If a source cannot be read or a value is invalid
        """
        config_data: Dict[str, Any] = {}
        self.sources = ["defaults"]

        if self.config_file.exists():
            config_data.update(self._read_json(self.config_file))
            self.sources.append(str(self.config_file))

        if self.yaml_config_file and self.yaml_config_file.exists():
            config_data.update(self._read_yaml(self.yaml_config_file))
            self.sources.append(str(self.yaml_config_file))

        if self.explicit_file:
            config_data.update(self._read_file(self.explicit_file))
            self.sources.append(str(self.explicit_file))

        for env_var, config_key in self.ENV_MAPPINGS.items():
            value = os.getenv(env_var)
            if value:
                config_data[config_key] = value
                self.sources.append(env_var)

        try:
            self.config = LabConfig(**config_data)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}") from e

        logger.debug(f"Configuration loaded from {', '.join(self.sources)}")
        return self.config

    def save(self, config: Optional[LabConfig] = None) -> None:
        """Save configuration to the JSON file.

        Args:
            config: Configuration to save (uses current if not provided)
        """
        if config:
            self.config = config

        if not self.config:
            raise ConfigurationError("No configuration to save")

        self.config_dir.mkdir(parents=True, exist_ok=True)
        with open(self.config_file, "w") as f:
            json.dump(self.config.model_dump(), f, indent=2)

    def update(self, **kwargs: Any) -> LabConfig:
        """Return the configuration with some values replaced.

        Raises:
            ConfigurationError: If an updated value is invalid
        """
        if not self.config:
            self.load()
        assert self.config is not None

        config_dict = self.config.model_dump()
        config_dict.update({k: v for k, v in kwargs.items() if v is not None})
        try:
            self.config = LabConfig(**config_dict)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}") from e
        return self.config

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        if not self.config:
            self.load()

        return getattr(self.config, key, default)

    def clear(self) -> None:
        """Delete the saved JSON configuration."""
        if self.config_file.exists():
            self.config_file.unlink()
        self.config = None
