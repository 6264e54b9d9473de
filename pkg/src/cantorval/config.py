import os
import sys
from dataclasses import dataclass, fields, asdict
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from loguru import logger

from .errors import ConfigError

DEFAULT_LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - <level>{message}</level>"


@dataclass
class AnalysisConfig:
    hull_eps: float = 1e-9
    power_tol: float = 1e-12
    max_power_iterations: int = 200000
    dim_tolerance: float = 1e-6
    bound: int = 3
    charpoly_max_nodes: int = 24


@dataclass
class SamplingConfig:
    samples: int = 10000
    burn_in: int = 100
    seed: int = 0
    streams: int = 1
    witness_samples: int = 100000
    witness_tolerance: float = 1e-3


@dataclass
class LimitConfig:
    max_word_length: int = 10_000_000
    max_patch_tiles: int = 2_000_000
    max_boundary_nodes: int = 10_000
    max_nielsen_moves: int = 10_000


@dataclass
class LogConfig:
    level: str = "WARNING"
    format: str = DEFAULT_LOG_FORMAT
    file_path: Optional[str] = None


def _section(cls, name: str, values: Any):
    if values is None:
        return cls()
    if not isinstance(values, dict):
        raise ConfigError(f"Config section '{name}' must be a mapping", {'section': name})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"Unknown keys in config section '{name}': {', '.join(unknown)}",
                          {'section': name, 'keys': unknown})
    return cls(**values)


class CantorvalConfig:
    def __init__(self, config_path: Optional[str] = None):
        load_dotenv()
        if config_path:
            self.config_path = config_path
        elif os.environ.get('CANTORVAL_CONFIG'):
            self.config_path = os.environ.get('CANTORVAL_CONFIG')
        else:
            self.config_path = os.path.expanduser('~/.cantorval/config.yaml')
        config = self._load_config_file()
        self.analysis = _section(AnalysisConfig, 'analysis', config.get('analysis'))
        self.sampling = _section(SamplingConfig, 'sampling', config.get('sampling'))
        self.limits = _section(LimitConfig, 'limits', config.get('limits'))
        self.logging = _section(LogConfig, 'logging', config.get('logging'))

    def _load_config_file(self) -> Dict[str, Any]:
        """Load configuration from a YAML (or JSON) file."""
        try:
            with open(self.config_path, 'r') as f:
                config = yaml.safe_load(f)
        except FileNotFoundError:
            logger.debug(f"No config file at {self.config_path}, using defaults")
            return {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"Cannot read config file {self.config_path}: {str(e)}",
                              {'path': self.config_path})
        if config is None:
            return {}
        if not isinstance(config, dict):
            raise ConfigError(f"Config file {self.config_path} must contain a mapping",
                              {'path': self.config_path})
        return config

    def to_dict(self) -> Dict[str, Any]:
        return {
            'analysis': asdict(self.analysis),
            'sampling': asdict(self.sampling),
            'limits': asdict(self.limits),
            'logging': asdict(self.logging),
        }


def setup_logging(log_config: LogConfig, debug: bool = False, quiet: bool = False) -> None:
    """Replace the loguru sinks: stderr at the configured level, plus an optional file."""
    level = "DEBUG" if debug else "ERROR" if quiet else log_config.level.upper()
    logger.remove()
    # sys.stderr is looked up per message
    logger.add(lambda message: sys.stderr.write(message), level=level, format=log_config.format)
    if log_config.file_path:
        logger.add(log_config.file_path, level="DEBUG" if debug else log_config.level.upper(),
                   format=log_config.format)
