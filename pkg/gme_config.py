#!/usr/bin/env python3
"""
Configuration for the GME toolkit.

Defaults live as JSON files in the ``config`` directory next to this module.
Each file is optional: a missing directory or file falls back to the embedded
values below, with a warning, so the library still works from a bare checkout.
"""

import json
import logging
import os
from dataclasses import dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from gme_errors import InvalidParameterError

__version__ = "0.3.0"

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_DIR = Path(__file__).resolve().parent / "config"
CONFIG_DIR_ENV = "GME_CONFIG_DIR"
THREADS_ENV = "GME_THREADS"

CONFIG_FILES = {
    "tolerances": "tolerances.json",
    "optimizer": "optimizer.json",
    "scan": "scan.json",
}

EMBEDDED_CONFIG: Dict[str, Dict[str, Any]] = {
    "tolerances": {
        "hermiticity": 1e-12,
        "psd": 1e-10,
        "trace": 1e-12,
        "unit_norm": 1e-12,
        "eigen": 1e-10,
        "choi_psd": 1e-10,
        "dual_path_error": 1e-6,
        "dual_path_agreement": 1e-8,
        "analytic_agreement": 1e-6,
        "separable_multiplicativity": 1e-6,
        "violation_floor": 1e-9,
        "witness": 1e-12,
        "parameter_slack": 1e-12,
    },
    "optimizer": {
        "restarts": 64,
        "two_copy_restarts": 256,
        "max_iterations": 1000,
        "objective_tolerance": 1e-12,
        "seed": 20240917,
    },
    "scan": {
        "step": 0.025,
        "threshold": 1e-5,
        "d": 3,
        "float_digits": 12,
        "schema_version": "1",
    },
}


@dataclass(frozen=True)
class Tolerances:
    """Every numerical tolerance used across the package."""

    hermiticity: float
    psd: float
    trace: float
    unit_norm: float
    eigen: float
    choi_psd: float
    dual_path_error: float
    dual_path_agreement: float
    analytic_agreement: float
    separable_multiplicativity: float
    violation_floor: float
    witness: float
    parameter_slack: float


@dataclass(frozen=True)
class OptimizerDefaults:
    restarts: int
    two_copy_restarts: int
    max_iterations: int
    objective_tolerance: float
    seed: int


@dataclass(frozen=True)
class ScanDefaults:
    step: float
    threshold: float
    d: int
    float_digits: int
    schema_version: str


@dataclass(frozen=True)
class GmeConfig:
    tolerances: Tolerances
    optimizer: OptimizerDefaults
    scan: ScanDefaults
    source: str


def _build_record(record_type, values: Dict[str, Any], section: str):
    """Build a frozen record, filling keys missing from ``values`` with embedded defaults."""
    known = {f.name for f in fields(record_type)}
    unknown = set(values) - known
    if unknown:
        logger.warning("Ignoring unknown keys in %s config: %s", section, sorted(unknown))
    merged = dict(EMBEDDED_CONFIG[section])
    merged.update({k: v for k, v in values.items() if k in known})
    try:
        return record_type(**merged)
    except TypeError as e:
        raise InvalidParameterError(f"Malformed {section} config: {e}") from e


def _validate(config: GmeConfig) -> GmeConfig:
    for f in fields(config.tolerances):
        if getattr(config.tolerances, f.name) <= 0:
            raise InvalidParameterError(f"Tolerance {f.name} must be positive")
    opt = config.optimizer
    if opt.restarts < 1 or opt.two_copy_restarts < 1 or opt.max_iterations < 1:
        raise InvalidParameterError("Optimizer restarts and iterations must be at least 1")
    if opt.objective_tolerance <= 0:
        raise InvalidParameterError("objective_tolerance must be positive")
    if config.scan.step <= 0 or config.scan.threshold <= 0:
        raise InvalidParameterError("Scan step and threshold must be positive")
    return config


def load_config(config_path: Optional[os.PathLike] = None) -> GmeConfig:
    """Load all configuration files from the config directory."""
    if config_path is None:
        config_path = os.environ.get(CONFIG_DIR_ENV, DEFAULT_CONFIG_DIR)
    config_dir = Path(config_path)

    raw: Dict[str, Dict[str, Any]] = {}
    if not config_dir.is_dir():
        logger.warning("Config directory %s not found. Using embedded configuration.", config_dir)
        raw = {key: {} for key in CONFIG_FILES}
    else:
        for key, filename in CONFIG_FILES.items():
            file_path = config_dir / filename
            if file_path.exists():
                with open(file_path, "r", encoding="utf-8") as f:
                    raw[key] = json.load(f)
            else:
                logger.warning("Config file %s not found. Using embedded configuration for %s.", file_path, key)
                raw[key] = {}

    config = GmeConfig(
        tolerances=_build_record(Tolerances, raw["tolerances"], "tolerances"),
        optimizer=_build_record(OptimizerDefaults, raw["optimizer"], "optimizer"),
        scan=_build_record(ScanDefaults, raw["scan"], "scan"),
        source=str(config_dir),
    )
    return _validate(config)


@lru_cache(maxsize=1)
def get_config() -> GmeConfig:
    """Process-wide configuration, loaded once."""
    return load_config()


def tolerances() -> Tolerances:
    return get_config().tolerances


def default_workers() -> int:
    """Worker count for parallel scans, from ``GME_THREADS`` (default 1)."""
    value = os.environ.get(THREADS_ENV, "1")
    try:
        workers = int(value)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", THREADS_ENV, value)
        return 1
    return max(1, workers)


def setup_logging(verbosity: int = 0) -> None:
    """Configure root logging for command-line use: 0 warning, 1 info, 2+ debug."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
