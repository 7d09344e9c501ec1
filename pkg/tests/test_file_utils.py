"""
Tests unitaires pour les utilitaires de fichiers
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.utils.file_utils import FileUtils


class TestFileUtilsDirectory:
    def test_ensure_directory_nested(self, temp_directory):
        nested = Path(temp_directory) / "a" / "b" / "c"
        assert FileUtils.ensure_directory(str(nested)) is True
        assert nested.is_dir()


class TestFileUtilsJson:
    """Tests de l'écriture et de la lecture JSON"""

    def test_round_trip_with_numpy_values(self, temp_directory):
        path = str(Path(temp_directory) / "out" / "r.json")
        data = {"rate": np.float64(0.25), "wins": np.int64(3), "ok": np.bool_(True), "état": "π"}
        assert FileUtils.write_json(data, path) == (True, None)

        loaded, error = FileUtils.read_json(path)
        assert error is None
        assert loaded == {"rate": 0.25, "wins": 3, "ok": True, "état": "π"}

    def test_read_missing(self, temp_directory):
        data, error = FileUtils.read_json(str(Path(temp_directory) / "absent.json"))
        assert data is None
        assert "n'existe pas" in error

    def test_read_invalid(self, temp_directory):
        path = Path(temp_directory) / "bad.json"
        path.write_text("{", encoding="utf-8")
        data, error = FileUtils.read_json(str(path))
        assert data is None
        assert "JSON invalide" in error


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
