"""Test configuration loading."""

import json
import logging

import pytest

from gme_config import (
    DEFAULT_CONFIG_DIR,
    EMBEDDED_CONFIG,
    default_workers,
    load_config,
    setup_logging,
)
from gme_errors import InvalidParameterError


def test_shipped_files_match_embedded_defaults():
    """The JSON files in config/ carry the same values as the embedded fallback."""
    config = load_config(DEFAULT_CONFIG_DIR)
    for key, value in EMBEDDED_CONFIG["tolerances"].items():
        assert getattr(config.tolerances, key) == value
    for key, value in EMBEDDED_CONFIG["optimizer"].items():
        assert getattr(config.optimizer, key) == value
    for key, value in EMBEDDED_CONFIG["scan"].items():
        assert getattr(config.scan, key) == value


def test_missing_directory_falls_back(tmp_path, caplog):
    """A missing config directory logs a warning and uses the embedded values."""
    with caplog.at_level(logging.WARNING, logger="gme_config"):
        config = load_config(tmp_path / "nowhere")
    assert config.optimizer.restarts == EMBEDDED_CONFIG["optimizer"]["restarts"]
    assert "Using embedded configuration" in caplog.text


def test_partial_file_is_merged(tmp_path):
    """Keys missing from a file keep their embedded defaults."""
    (tmp_path / "optimizer.json").write_text(json.dumps({"restarts": 5}))
    config = load_config(tmp_path)
    assert config.optimizer.restarts == 5
    assert config.optimizer.max_iterations == EMBEDDED_CONFIG["optimizer"]["max_iterations"]
    assert config.tolerances.witness == 1e-12


def test_unknown_keys_are_ignored(tmp_path, caplog):
    """Unknown keys produce a warning, not an error."""
    (tmp_path / "scan.json").write_text(json.dumps({"step": 0.05, "colour": "red"}))
    with caplog.at_level(logging.WARNING, logger="gme_config"):
        config = load_config(tmp_path)
    assert config.scan.step == 0.05
    assert "colour" in caplog.text


def test_nonpositive_tolerance_rejected(tmp_path):
    """Tolerances must be positive."""
    (tmp_path / "tolerances.json").write_text(json.dumps({"psd": -1.0}))
    with pytest.raises(InvalidParameterError):
        load_config(tmp_path)


def test_environment_selects_directory(tmp_path, monkeypatch):
    """GME_CONFIG_DIR overrides the default directory."""
    (tmp_path / "optimizer.json").write_text(json.dumps({"seed": 99}))
    monkeypatch.setenv("GME_CONFIG_DIR", str(tmp_path))
    assert load_config().optimizer.seed == 99


@pytest.mark.parametrize("value, expected", [("4", 4), ("0", 1), ("many", 1)])
def test_default_workers(monkeypatch, value, expected):
    """GME_THREADS sets the worker count, with 1 as the floor and fallback."""
    monkeypatch.setenv("GME_THREADS", value)
    assert default_workers() == expected


def test_setup_logging_runs():
    """setup_logging accepts every verbosity level."""
    for verbosity in (0, 1, 2):
        setup_logging(verbosity)
