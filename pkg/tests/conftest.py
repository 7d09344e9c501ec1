"""
Configuration pytest pour UnclonableLab
Fixtures partagées et configuration des tests
"""

import json
import pytest
import numpy as np
import tempfile
import os
import sys
from pathlib import Path

# Ajouter le répertoire racine au path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.config import (
    DEFAULT_PRESETS_PATH, AppConfig, ConfigManager, PresetConfig, get_preset, set_config
)
from src.core.logger import Logger, LogLevel, set_logger


@pytest.fixture(autouse=True)
def quiet_logger(tmp_path):
    """Logger sans console ni fichier, installé globalement pour chaque test"""
    logger = Logger(log_dir=tmp_path / "logs", level=LogLevel.DEBUG, console=False)
    set_logger(logger)
    yield logger


@pytest.fixture(autouse=True)
def default_config():
    """Configuration active par défaut (plafonds de simulation standard)"""
    config = AppConfig()
    config.performance.workers = 1
    set_config(config)
    yield config
    set_config(AppConfig())


@pytest.fixture
def rng():
    """Générateur à graine fixe"""
    return np.random.default_rng(20240607)


def _safe_rmtree(path):
    """Supprime un répertoire en ignorant les erreurs de permission Windows"""
    import shutil
    import gc
    gc.collect()
    try:
        if os.path.exists(path):
            shutil.rmtree(path, ignore_errors=True)
    except (PermissionError, OSError):
        pass


@pytest.fixture
def temp_directory():
    """Crée un répertoire temporaire"""
    tmpdir = tempfile.mkdtemp()
    yield tmpdir

    _safe_rmtree(tmpdir)


@pytest.fixture
def config_manager(temp_directory):
    """ConfigManager isolé dans un répertoire temporaire"""
    return ConfigManager(Path(temp_directory) / "config.json")


@pytest.fixture
def toy_preset() -> PresetConfig:
    return get_preset("toy")


@pytest.fixture
def paper_preset() -> PresetConfig:
    return get_preset("paper")


@pytest.fixture
def custom_presets_file(temp_directory) -> str:
    """Fichier de presets ne contenant que « custom », copie de toy"""
    with open(DEFAULT_PRESETS_PATH, encoding="utf-8") as f:
        toy = json.load(f)["presets"]["toy"]
    path = Path(temp_directory) / "presets_custom.json"
    path.write_text(json.dumps({"presets": {"custom": {**toy, "description": "copie de toy"}}}),
                    encoding="utf-8")
    return str(path)
