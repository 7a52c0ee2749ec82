"""Configuration management for sdsbm-lab runs."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from loguru import logger

from .clustering import KMeansOptions
from .utils.misc import parse_bool

# Config files tried in order when no explicit path is given (or it is missing)
PATHS_TO_CHECK = [
    "./sdsbm_lab.yaml",
    "~/.config/sdsbm_lab/config.yaml",
]

KNOWN_METHODS = ("KMA", "KMP", "SPECTRAL", "DSCORE")

DEFAULT_N_GRID = [100, 200, 400, 600, 800, 1000, 1500]


@dataclass
class RunConfig:
    """Configuration for a Monte-Carlo run and the methods it evaluates."""

    # Experiment grid
    n_grid: List[int] = field(default_factory=lambda: list(DEFAULT_N_GRID))
    mc: int = 50
    methods: List[str] = field(default_factory=lambda: list(KNOWN_METHODS))
    master_seed: int = 20240917

    # Estimator and clustering
    h_constant: float = 1.0
    kmeans: KMeansOptions = field(default_factory=KMeansOptions)

    # Baselines
    svd_tol: float = 1e-10
    svd_max_iters: int = 1000
    svd_oversample: int = 10
    dscore_clip: Optional[float] = None  # None means log n

    # Execution and output
    jobs: int = 1
    record_timing: bool = True
    progress: bool = True
    out_dir: str = "results"
    verbose: bool = False

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "RunConfig":
        """Create config from dictionary, ignoring unknown keys."""
        valid_fields = {k: v for k, v in config_dict.items() if k in cls.__annotations__}

        if "kmeans" in valid_fields:
            kmeans = valid_fields["kmeans"]
            if isinstance(kmeans, dict):
                valid_fields["kmeans"] = KMeansOptions.from_dict(kmeans)
            elif not isinstance(kmeans, KMeansOptions):
                raise ValueError("kmeans must be a mapping of K-means options")

        if "methods" in valid_fields and isinstance(valid_fields["methods"], list):
            valid_fields["methods"] = [str(m).upper() for m in valid_fields["methods"]]

        return cls(**valid_fields)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        result = {}
        for k, v in self.__dict__.items():
            if k.startswith("_"):
                continue
            result[k] = v.to_dict() if isinstance(v, KMeansOptions) else v
        return result

    def validate(self) -> None:
        """Validate configuration."""
        if self.mc < 1:
            raise ValueError(f"mc must be >= 1, got {self.mc}")

        if not self.n_grid:
            raise ValueError("n_grid must not be empty")
        if any(n < 3 for n in self.n_grid):
            raise ValueError(f"Every n in n_grid must be >= 3, got {self.n_grid}")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n_grid must be strictly increasing, got {self.n_grid}")

        if not self.methods:
            raise ValueError("At least one method is required")
        unknown = [m for m in self.methods if m not in KNOWN_METHODS]
        if unknown:
            raise ValueError(
                f"Unknown method(s) {', '.join(unknown)}; expected a subset of {', '.join(KNOWN_METHODS)}"
            )
        if len(set(self.methods)) != len(self.methods):
            raise ValueError(f"Duplicate methods in {self.methods}")

        if self.master_seed < 0:
            raise ValueError(f"master_seed must be nonnegative, got {self.master_seed}")
        if self.h_constant <= 0:
            raise ValueError(f"h_constant must be positive, got {self.h_constant}")
        if self.svd_tol <= 0:
            raise ValueError(f"svd_tol must be positive, got {self.svd_tol}")
        if self.svd_max_iters < 1:
            raise ValueError(f"svd_max_iters must be >= 1, got {self.svd_max_iters}")
        if self.svd_oversample < 0:
            raise ValueError(f"svd_oversample must be >= 0, got {self.svd_oversample}")
        if self.dscore_clip is not None and self.dscore_clip <= 0:
            raise ValueError(f"dscore_clip must be positive, got {self.dscore_clip}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")

        self.kmeans.validate()


def load_config_from_file(config_path: str) -> Optional[RunConfig]:
    """Load configuration from a YAML file; None when the file does not exist."""
    path = Path(config_path)
    if not path.exists():
        return None

    try:
        with open(path, "r", encoding="utf-8") as f:
            config_dict = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ValueError(f"Malformed config file {config_path}: {e}") from e
    except OSError as e:
        raise OSError(f"Failed to read config file {config_path}: {e}") from e

    if not isinstance(config_dict, dict):
        raise ValueError(f"Config file {config_path} must contain a key-value mapping")
    try:
        return RunConfig.from_dict(config_dict)
    except TypeError as e:
        raise ValueError(f"Invalid value in config file {config_path}: {e}") from e


def load_config(config_path: Optional[str] = None) -> RunConfig:
    """Load configuration from file, then apply environment overrides.

    1. Try the given path, then each of PATHS_TO_CHECK
    2. Fall back to defaults when no file is found
    3. Apply SDSBM_LAB_JOBS, SDSBM_LAB_SEED and SDSBM_LAB_VERBOSE
    """
    config = None
    config_file_used = None

    if config_path:
        config = load_config_from_file(config_path)
        if config:
            config_file_used = config_path
        else:
            logger.warning(f"Config file {config_path} not found, trying defaults")

    if not config:
        for path in PATHS_TO_CHECK:
            expanded_path = os.path.expanduser(path)
            config = load_config_from_file(expanded_path)
            if config:
                config_file_used = expanded_path
                break

    if config:
        logger.info(f"Loaded configuration from {config_file_used}")
    else:
        logger.debug("No configuration file found, using defaults")
        config = RunConfig()

    env_overrides = {
        "jobs": os.getenv("SDSBM_LAB_JOBS"),
        "master_seed": os.getenv("SDSBM_LAB_SEED"),
        "verbose": os.getenv("SDSBM_LAB_VERBOSE"),
    }
    for key, value in env_overrides.items():
        if value is None:
            continue
        try:
            if key == "verbose":
                setattr(config, key, parse_bool(value))
            else:
                setattr(config, key, int(value))
        except ValueError:
            raise ValueError(f"Invalid environment override for {key}: {value!r}")

    try:
        config.validate()
    except ValueError as e:
        logger.error(f"Configuration validation failed: {e}")
        if config_file_used:
            logger.error(f"Please check your configuration file: {config_file_used}")
        raise

    return config


def save_config(config: RunConfig, config_path: str) -> None:
    """Save configuration to YAML file."""
    path = Path(config_path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.dump(config.to_dict(), f, default_flow_style=False)
    except OSError as e:
        raise OSError(f"Failed to write config file {config_path}: {e}") from e

    logger.info(f"Configuration saved to {config_path}")
