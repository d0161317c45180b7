"""Unit tests for configuration."""

import os
import tempfile

import pytest

from coverage_scout.core.config import SEED_ENV, Config
from coverage_scout.exceptions import ConfigurationError


class TestConfig:
    """Tests for Config loading."""

    def test_default_config(self):
        """Test default configuration values."""
        config = Config()

        assert config.version == "1.0"
        assert config.mapgen.side == 121
        assert config.mapgen.resolution_m == 4.0
        assert config.agent.step_limit == 15
        assert config.agent.eps_ch_db == -100.0
        assert config.experiment.methods == ["rsp", "bnp", "grsp", "gbnp"]
        assert config.experiment.shared_starts

    def test_from_dict(self):
        """Test loading from dictionary."""
        data = {
            "mapgen": {"side": 41, "target_fill": 0.25},
            "agent": {"step_limit": 5, "dtype": "float64"},
            "experiment": {"n_sam": [100, 25, 25], "methods": [" RSP ", "bnp@16"]},
        }

        config = Config.from_dict(data)

        assert config.mapgen.side == 41
        assert config.agent.step_limit == 5
        assert config.experiment.n_sam == [25, 100]
        assert config.experiment.methods == ["rsp", "bnp@16"]

    def test_from_yaml(self):
        """Test loading from YAML file."""
        yaml_content = """
version: "1.0"
seed: 11
mapgen:
  side: 61
  street_width: 1
propagation:
  wall_loss_db: 12.5
experiment:
  k_values: [4, 1, 2]
"""

        with tempfile.NamedTemporaryFile(mode="w", suffix=".yml", delete=False) as f:
            f.write(yaml_content)
            temp_path = f.name

        try:
            config = Config.from_yaml(temp_path)

            assert config.seed == 11
            assert config.mapgen.side == 61
            assert config.propagation.wall_loss_db == 12.5
            assert config.experiment.k_values == [1, 2, 4]
        finally:
            os.unlink(temp_path)

    def test_env_var_substitution(self, monkeypatch):
        """Test environment variable substitution."""
        monkeypatch.setenv("TEST_SCOUT_OUT", "/tmp/scout-results")

        yaml_content = """
reporting:
  output_dir: ${TEST_SCOUT_OUT}
experiment:
  checkpoint: ${UNSET_SCOUT_VAR}
"""

        with tempfile.NamedTemporaryFile(mode="w", suffix=".yml", delete=False) as f:
            f.write(yaml_content)
            temp_path = f.name

        try:
            config = Config.from_yaml(temp_path)

            assert config.reporting.output_dir == "/tmp/scout-results"
            assert config.experiment.checkpoint == "${UNSET_SCOUT_VAR}"
        finally:
            os.unlink(temp_path)

    def test_missing_file(self):
        """Test that a missing file raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="not found"):
            Config.from_yaml("/nonexistent/scout.yml")

    def test_invalid_values(self):
        """Test that out-of-range values are rejected."""
        with pytest.raises(ConfigurationError):
            Config.from_dict({"mapgen": {"target_fill": 1.5}})
        with pytest.raises(ConfigurationError):
            Config.from_dict({"mapgen": {"min_footprint": 6, "max_footprint": 3}})
        with pytest.raises(ConfigurationError):
            Config.from_dict({"experiment": {"k_values": [-1]}})
        with pytest.raises(ConfigurationError):
            Config.from_dict({"agent": {"eps_ch_db": 5.0}})

    def test_unknown_keys_rejected(self, tmp_path):
        """Test that misspelled keys in a config file are errors, not silently dropped."""
        with pytest.raises(ConfigurationError, match="wall_los"):
            Config.from_dict({"propagation": {"wall_los_db": 10.0}})
        with pytest.raises(ConfigurationError):
            Config.from_dict({"experiments": {"n_sam": [10]}})

        path = tmp_path / "typo.yml"
        path.write_text("agent:\n  step_limt: 5\n")
        with pytest.raises(ConfigurationError, match="step_limt"):
            Config.from_yaml(str(path))

    def test_propagation_defaults(self):
        """Test the tuned coverage-model defaults and the plain-count switch."""
        config = Config()

        assert config.propagation.p0_db == -30.0
        assert config.propagation.pathloss_exponent == 3.0
        assert config.propagation.wall_loss_db == 15.0
        assert config.propagation.max_wall_losses == 4
        assert config.propagation.wall_decay_cells == 1.0
        plain = Config.from_dict({"propagation": {"wall_decay_cells": None}})
        assert plain.propagation.wall_decay_cells is None

    def test_yaml_round_trip(self, tmp_path):
        """Test that to_yaml output loads back to the same config."""
        config = Config.from_dict({"seed": 3, "agent": {"episodes": 12}})
        path = tmp_path / "config.yml"

        config.to_yaml(path)

        assert Config.from_yaml(str(path)) == config


class TestMerge:
    """Tests for dotted-key overrides."""

    def test_override_applied(self):
        """Test that a dotted key replaces the nested value."""
        config = Config().merge({"mapgen.target_fill": 0.2, "jobs": 4})

        assert config.mapgen.target_fill == 0.2
        assert config.jobs == 4

    def test_none_ignored(self):
        """Test that None overrides leave file values alone."""
        base = Config.from_dict({"agent": {"step_limit": 7}})

        merged = base.merge({"agent.step_limit": None})

        assert merged.agent.step_limit == 7

    def test_unknown_key(self):
        """Test that unknown keys are reported."""
        with pytest.raises(ConfigurationError, match="Unknown config key"):
            Config().merge({"agent.no_such_field": 1})

    def test_merge_is_validated(self):
        """Test that overrides go through validation."""
        with pytest.raises(ConfigurationError):
            Config().merge({"experiment.n_sam": [0]})


class TestResolveSeed:
    """Tests for seed precedence."""

    def test_flag_wins(self, monkeypatch):
        """Test that the CLI flag beats config and environment."""
        monkeypatch.setenv(SEED_ENV, "99")
        assert Config(seed=5).resolve_seed(1) == 1

    def test_config_before_env(self, monkeypatch):
        """Test that the config seed beats the environment."""
        monkeypatch.setenv(SEED_ENV, "99")
        assert Config(seed=5).resolve_seed() == 5

    def test_env_then_zero(self, monkeypatch):
        """Test the environment fallback and the final default."""
        monkeypatch.setenv(SEED_ENV, "42")
        assert Config().resolve_seed() == 42

        monkeypatch.delenv(SEED_ENV)
        assert Config().resolve_seed() == 0

    def test_bad_env_seed(self, monkeypatch):
        """Test that a non-integer seed variable is a configuration error."""
        monkeypatch.setenv(SEED_ENV, "abc")
        with pytest.raises(ConfigurationError, match=SEED_ENV):
            Config().resolve_seed()
