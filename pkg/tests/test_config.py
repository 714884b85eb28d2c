"""Tests for configuration management."""

import json
import os
from unittest.mock import patch

import pytest
import yaml
from pydantic import ValidationError

from unitary_dual_lab.config.manager import ConfigManager, LabConfig
from unitary_dual_lab.core.exceptions import ConfigurationError


class TestLabConfig:
    """Test LabConfig model."""

    def test_defaults(self, lab_config):
        assert lab_config.paths == 10_000
        assert lab_config.dt == 0.01
        assert lab_config.seed == 20240611
        assert lab_config.scheme == "geodesic"
        assert lab_config.workers == 1
        assert lab_config.max_states == 100_000
        assert lab_config.json_logs is False

    @pytest.mark.parametrize(
        "field,value",
        [("paths", 0), ("dt", 0), ("seed", -1), ("scheme", "midpoint"), ("rtol", 0.0)],
    )
    def test_invalid_values(self, field, value):
        with pytest.raises(ValidationError):
            LabConfig(**{field: value})

    def test_string_values_are_coerced(self):
        config = LabConfig(paths="250", dt="0.5")
        assert config.paths == 250
        assert config.dt == 0.5


class TestConfigManager:
    """Test ConfigManager class."""

    @pytest.fixture(autouse=True)
    def isolated_cwd(self, tmp_path, monkeypatch):
        """Run every test away from stray udl.yaml and .env files."""
        work = tmp_path / "work"
        work.mkdir()
        monkeypatch.chdir(work)
        return work

    def test_init_with_custom_dir(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        assert manager.config_dir == temp_config_dir
        assert manager.config_file == temp_config_dir / "config.json"
        assert manager.yaml_config_file is None

    def test_load_defaults(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        config = manager.load()
        assert config == LabConfig()
        assert manager.sources == ["defaults"]

    @patch.dict(os.environ, {"UDL_PATHS": "500", "UDL_SCHEME": "euler-renorm"})
    def test_load_from_environment(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        config = manager.load()

        assert config.paths == 500
        assert config.scheme == "euler-renorm"
        assert "UDL_PATHS" in manager.sources

    def test_load_from_json_file(self, temp_config_dir):
        (temp_config_dir / "config.json").write_text(
            json.dumps({"paths": 123, "seed": 9, "unrelated": True})
        )

        config = ConfigManager(config_dir=temp_config_dir).load()

        assert config.paths == 123
        assert config.seed == 9

    def test_load_from_working_directory_yaml(self, temp_config_dir, isolated_cwd):
        content = {
            "simulation": {"paths": 64, "dt": 0.05},
            "solver": {"max_states": 500},
            "logging": {"level": "DEBUG", "json": True},
        }
        with open(isolated_cwd / "udl.yaml", "w") as f:
            yaml.dump(content, f)

        manager = ConfigManager(config_dir=temp_config_dir)
        config = manager.load()

        assert config.paths == 64
        assert config.dt == 0.05
        assert config.max_states == 500
        assert config.log_level == "DEBUG"
        assert config.json_logs is True
        assert manager.sources == ["defaults", "udl.yaml"]

    def test_explicit_yaml_accepts_flat_keys(self, temp_config_dir, tmp_path):
        path = tmp_path / "run.yml"
        path.write_text("workers: 3\nchunk_size: 8\n")

        config = ConfigManager(config_dir=temp_config_dir, config_file=str(path)).load()

        assert config.workers == 3
        assert config.chunk_size == 8

    def test_explicit_key_value_file(self, temp_config_dir, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("UDL_SEED=42\ndt=0.2\n")

        config = ConfigManager(config_dir=temp_config_dir, config_file=str(path)).load()

        assert config.seed == 42
        assert config.dt == 0.2

    def test_unknown_key_value_entry(self, temp_config_dir, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("API_KEY=abc\n")

        with pytest.raises(ConfigurationError, match="unknown configuration key"):
            ConfigManager(config_dir=temp_config_dir, config_file=str(path)).load()

    def test_missing_explicit_file(self, temp_config_dir, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            ConfigManager(config_dir=temp_config_dir, config_file=str(tmp_path / "nope.yaml"))

    def test_priority_order(self, temp_config_dir, isolated_cwd, tmp_path):
        (temp_config_dir / "config.json").write_text(json.dumps({"paths": 1, "dt": 0.1, "seed": 1}))
        (isolated_cwd / "udl.yaml").write_text("simulation:\n  paths: 2\n  dt: 0.2\n")
        explicit = tmp_path / "run.json"
        explicit.write_text(json.dumps({"paths": 3}))

        with patch.dict(os.environ, {"UDL_PATHS": "4"}):
            config = ConfigManager(config_dir=temp_config_dir, config_file=str(explicit)).load()

        assert config.paths == 4
        assert config.dt == 0.2
        assert config.seed == 1

    @patch.dict(os.environ, {"UDL_DT": "-1"})
    def test_invalid_environment_value(self, temp_config_dir):
        with pytest.raises(ConfigurationError, match="Invalid configuration"):
            ConfigManager(config_dir=temp_config_dir).load()

    def test_invalid_yaml_file(self, temp_config_dir, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("simulation: [unclosed\n")

        with pytest.raises(ConfigurationError):
            ConfigManager(config_dir=temp_config_dir, config_file=str(path)).load()

    def test_yaml_must_be_mapping(self, temp_config_dir, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ConfigurationError, match="mapping"):
            ConfigManager(config_dir=temp_config_dir, config_file=str(path)).load()

    def test_invalid_json_file(self, temp_config_dir):
        (temp_config_dir / "config.json").write_text('{"paths": oops}')

        with pytest.raises(ConfigurationError):
            ConfigManager(config_dir=temp_config_dir).load()

    def test_save_config(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        manager.save(LabConfig(paths=77, scheme="euler-renorm"))

        saved = json.loads(manager.config_file.read_text())
        assert saved["paths"] == 77
        assert saved["scheme"] == "euler-renorm"

    def test_save_without_config(self, temp_config_dir):
        with pytest.raises(ConfigurationError):
            ConfigManager(config_dir=temp_config_dir).save()

    def test_update_config(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        updated = manager.update(workers=4, dt=None)

        assert updated.workers == 4
        assert updated.dt == 0.01

    def test_update_rejects_invalid_value(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        with pytest.raises(ConfigurationError):
            manager.update(paths=0)

    def test_get_config_value(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        assert manager.get("paths") == 10_000
        assert manager.get("nonexistent", "default") == "default"

    def test_clear_config(self, temp_config_dir):
        manager = ConfigManager(config_dir=temp_config_dir)
        manager.save(LabConfig())
        manager.clear()

        assert not manager.config_file.exists()
        assert manager.config is None
