"""
Utilitaires de gestion de fichiers pour UnclonableLab
"""

import json
from pathlib import Path
from typing import Any, Optional, Tuple

import numpy as np


def _json_default(value: Any) -> Any:
    """Types numpy et objets divers vers JSON"""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    return str(value)


class FileUtils:
    """Classe utilitaire pour les opérations sur les fichiers"""

    @staticmethod
    def ensure_directory(directory: str) -> bool:
        """
        Crée un répertoire s'il n'existe pas

        Returns:
            True si le répertoire existe ou a été créé
        """
        try:
            Path(directory).mkdir(parents=True, exist_ok=True)
            return True
        except Exception:
            return False

    @staticmethod
    def write_json(data: Any, filepath: str, indent: int = 2) -> Tuple[bool, Optional[str]]:
        """
        Écrit un document JSON (UTF-8), dossier parent créé au besoin

        Returns:
            Tuple (succès, message d'erreur ou None)
        """
        try:
            path = Path(filepath)
            if not FileUtils.ensure_directory(str(path.parent)):
                return False, f"Impossible de créer le dossier {path.parent}"
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(data, f, indent=indent, ensure_ascii=False, default=_json_default)
            return True, None
        except Exception as e:
            return False, str(e)

    @staticmethod
    def read_json(filepath: str) -> Tuple[Optional[Any], Optional[str]]:
        """
        Lit un document JSON

        Returns:
            Tuple (données ou None, erreur ou None)
        """
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                return json.load(f), None
        except FileNotFoundError:
            return None, f"Le fichier n'existe pas: {filepath}"
        except json.JSONDecodeError as e:
            return None, f"JSON invalide: {e}"
        except OSError as e:
            return None, str(e)

