"""
Tests unitaires pour le gestionnaire de configuration et les presets
"""

import pytest
import sys
import json
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.config import (
    ConfigManager, AppConfig, SimulationConfig, PerformanceConfig, ExportConfig,
    ModuleConfig, PresetConfig, get_preset, load_presets, resolve_workers
)
from src.core.constants import WORKERS_ENV_VAR
from src.core.errors import ConfigError


class TestSimulationConfig:
    """Tests pour SimulationConfig"""

    def test_default_caps(self):
        """Plafonds par défaut du simulateur"""
        config = SimulationConfig()
        assert config.statevector_cap == 24
        assert config.dense_clifford_cap == 6
        assert config.gl_formula_cap == 12
        assert config.twirl_enumeration_cap == 2


class TestAppConfig:
    """Tests pour AppConfig"""

    def test_nested_configs(self):
        config = AppConfig()
        assert isinstance(config.export, ExportConfig)
        assert isinstance(config.performance, PerformanceConfig)
        assert config.log.level == "INFO"
        assert config.games.default_preset == "toy"


class TestConfigManager:
    """Tests pour ConfigManager"""

    def test_defaults_without_file(self, config_manager):
        assert config_manager.config.simulation.statevector_cap == 24

    def test_save_and_load(self, config_manager):
        config_manager.set("games.default_trials", 250)
        assert config_manager.save() is True

        reloaded = ConfigManager(config_manager.config_path)
        assert reloaded.config.games.default_trials == 250

    def test_get_nested_value(self, config_manager):
        assert config_manager.get("export.header_bg_color") == "#1F4E79"
        assert config_manager.get("export.inconnu", "défaut") == "défaut"

    def test_set_auto_saves(self, config_manager):
        config_manager.config.auto_save_config = True
        config_manager.set("games.default_trials", 40)
        assert ConfigManager(config_manager.config_path).config.games.default_trials == 40

    def test_set_without_persist(self, config_manager):
        config_manager.config.auto_save_config = True
        config_manager.set("games.default_trials", 40, persist=False)
        assert config_manager.get("games.default_trials") == 40
        assert not config_manager.config_path.exists()

    def test_set_unknown_key_ignored(self, config_manager):
        config_manager.set("simulation.inconnu", 3)
        assert config_manager.get("simulation.inconnu") is None

    def test_module_settings(self, config_manager):
        config_manager.set_module_setting("twirl", "qubits", 2)
        module = config_manager.get_module_config("twirl")
        assert isinstance(module, ModuleConfig)
        assert module.settings["qubits"] == 2
        assert module.last_used is not None

    def test_corrupted_config_file(self, temp_directory):
        path = Path(temp_directory) / "config.json"
        path.write_text("{ pas du json", encoding="utf-8")
        manager = ConfigManager(path)
        assert manager.config.simulation.statevector_cap == 24


class TestPresets:
    """Tests des presets épinglés"""

    def test_pinned_presets(self):
        presets = load_presets()
        assert {"toy", "paper"} <= set(presets)
        assert all(isinstance(p, PresetConfig) for p in presets.values())

    def test_paper_preset_values(self, paper_preset):
        assert paper_preset.ue_lambda == 22
        assert paper_preset.cue_lambda == 23
        assert paper_preset.msg_len == 8
        assert paper_preset.scheme == "full"

    def test_toy_preset_uses_fixed_length_scheme(self, toy_preset):
        assert toy_preset.scheme == "toy"
        assert toy_preset.msg_len == toy_preset.toy_pad_rows

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            get_preset("inexistant")

    def test_unknown_key_rejected(self, temp_directory):
        path = Path(temp_directory) / "presets.json"
        path.write_text(json.dumps({"presets": {"x": {"lambda_inconnu": 3}}}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_presets(path)

    def test_manager_presets(self, config_manager):
        assert "paper" in config_manager.presets()


class TestResolveWorkers:
    """Tests de la résolution du nombre de workers"""

    def test_explicit_flag_wins(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "3")
        assert resolve_workers(5) == 5

    def test_environment_variable(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "3")
        assert resolve_workers(None) == 3

    def test_invalid_environment_variable(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "beaucoup")
        with pytest.raises(ConfigError):
            resolve_workers(None)

    def test_fallback(self, monkeypatch):
        monkeypatch.delenv(WORKERS_ENV_VAR, raising=False)
        assert resolve_workers(None, configured=2) == 2
        assert resolve_workers(None) >= 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
