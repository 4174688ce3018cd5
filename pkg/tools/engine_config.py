from typing import Dict, Any, Optional
import os
from pathlib import Path
import json
import logging

import psutil
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError as PydanticValidationError

from tools.errors import ConfigurationError

logger = logging.getLogger(__name__)


class EngineSettings(BaseModel):
    """Tunables for graph construction, searches and decoding."""

    max_dimension: int = Field(9, ge=2, le=9)
    exhaustive_max_vertices: int = Field(24, ge=1, le=32)
    exhaustive_max_t: int = Field(8, ge=1)
    randomized_samples: int = Field(100_000, ge=1)
    randomized_blocks: int = Field(64, ge=1)
    ambiguous_cap: int = Field(16, ge=1)
    diagnose_max_candidates: int = Field(2_000_000, ge=1)
    naive_max_vertices: int = Field(12, ge=1, le=16)
    threads: Optional[int] = Field(None, ge=1)
    seed: int = Field(20100601, ge=0, lt=2**64)
    log_level: str = "WARNING"

    def resolved_threads(self) -> int:
        """Worker count, falling back to the available parallelism."""
        if self.threads:
            return self.threads
        return psutil.cpu_count(logical=True) or 1


class EngineConfig:
    """Loads engine settings from defaults, environment variables and a JSON file."""

    ENV_VARIABLES = {
        'max_dimension': 'PMC_MAX_DIMENSION',
        'exhaustive_max_vertices': 'PMC_EXHAUSTIVE_MAX_VERTICES',
        'exhaustive_max_t': 'PMC_EXHAUSTIVE_MAX_T',
        'randomized_samples': 'PMC_RANDOMIZED_SAMPLES',
        'ambiguous_cap': 'PMC_AMBIGUOUS_CAP',
        'threads': 'PMC_THREADS',
        'seed': 'PMC_SEED',
        'log_level': 'PMC_LOG_LEVEL',
    }

    def __init__(self, config_file: Optional[str] = None):
        self.config_file = Path(config_file) if config_file else Path('config/engine.json')
        self.config: Dict[str, Any] = {}

    def load_config(self) -> EngineSettings:
        """Load settings: defaults, then environment variables, then the config file."""
        load_dotenv()
        try:
            env_config = {key: os.getenv(var) for key, var in self.ENV_VARIABLES.items()}
            self.config.update({k: v for k, v in env_config.items() if v not in (None, '')})

            if self.config_file.exists():
                with open(self.config_file) as f:
                    file_config = json.load(f)
                self.config.update(file_config)
                logger.info(f"Loaded engine configuration from {self.config_file}")

            return EngineSettings(**self.config)

        except PydanticValidationError as e:
            logger.error(f"Invalid engine configuration: {e}")
            raise ConfigurationError(f"Invalid engine configuration: {e}") from e
        except json.JSONDecodeError as e:
            logger.error(f"Malformed configuration file {self.config_file}: {e}")
            raise ConfigurationError(f"Malformed configuration file {self.config_file}: {e}") from e

    def save_config(self, settings: EngineSettings) -> None:
        """Save settings to the JSON config file."""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w') as f:
                json.dump(settings.model_dump(), f, indent=2)
        except OSError as e:
            logger.error(f"Error saving engine configuration: {str(e)}")
            raise


_settings: Optional[EngineSettings] = None


def get_settings() -> EngineSettings:
    """Process-wide settings, loaded on first use."""
    global _settings
    if _settings is None:
        _settings = EngineConfig().load_config()
    return _settings


def set_settings(settings: Optional[EngineSettings]) -> None:
    global _settings
    _settings = settings
