"""
Validateurs pour UnclonableLab
Validation des paramètres saisis en ligne de commande ou par les vérifications
"""

import re
from typing import Any, Tuple, Optional, Sequence
from pathlib import Path

SEED_LIMIT = 1 << 64


class Validators:
    """Classe utilitaire pour la validation des entrées utilisateur"""

    @staticmethod
    def is_valid_bitstring(value: str, length: Optional[int] = None) -> bool:
        """Vérifie qu'une chaîne ne contient que des 0 et des 1"""
        if value is None or not re.fullmatch(r"[01]*", value):
            return False
        return length is None or len(value) == length

    @staticmethod
    def validate_integer(
        value: Any,
        min_value: Optional[int] = None,
        max_value: Optional[int] = None,
        allow_none: bool = False
    ) -> Tuple[bool, Optional[str], Optional[int]]:
        """
        Valide et convertit une valeur entière

        Returns:
            Tuple (valide, message d'erreur ou None, valeur convertie ou None)
        """
        if value is None or (isinstance(value, str) and not value.strip()):
            if allow_none:
                return True, None, None
            return False, "Valeur requise", None

        if isinstance(value, bool):
            return False, f"Booléen au lieu d'un entier: {value}", None
        try:
            if isinstance(value, str):
                int_value = int(value.strip(), 10)
            elif isinstance(value, float):
                if not value.is_integer():
                    return False, "Valeur décimale non autorisée", None
                int_value = int(value)
            else:
                int_value = int(value)
        except (ValueError, TypeError):
            return False, f"Valeur non entière: {value}", None

        if min_value is not None and int_value < min_value:
            return False, f"Valeur trop petite (min: {min_value})", None

        if max_value is not None and int_value > max_value:
            return False, f"Valeur trop grande (max: {max_value})", None

        return True, None, int_value

    @staticmethod
    def validate_seed(seed: Any) -> Tuple[bool, Optional[str]]:
        """Graine maîtresse : entier non signé de 64 bits"""
        valid, error, _ = Validators.validate_integer(seed, 0, SEED_LIMIT - 1)
        if not valid:
            return False, f"Graine invalide ({error})"
        return True, None

    @staticmethod
    def validate_trials(trials: Any, max_trials: Optional[int] = None) -> Tuple[bool, Optional[str]]:
        valid, error, _ = Validators.validate_integer(trials, 1, max_trials)
        if not valid:
            return False, f"Nombre d'essais invalide ({error})"
        return True, None

    @staticmethod
    def validate_qubits(count: Any, allowed: Sequence[int]) -> Tuple[bool, Optional[str]]:
        """Nombre de qubits parmi les tailles supportées"""
        valid, error, value = Validators.validate_integer(count)
        if not valid:
            return False, f"Nombre de qubits invalide ({error})"
        if value not in allowed:
            return False, f"Nombre de qubits {value} non supporté (choix: {', '.join(map(str, allowed))})"
        return True, None

    @staticmethod
    def validate_choice(
        value: str,
        valid_choices: Sequence[str],
        case_sensitive: bool = True
    ) -> Tuple[bool, Optional[str]]:
        """
        Valide qu'une valeur est dans une liste de choix (jeu, adversaire, preset...)

        Returns:
            Tuple (valide, message d'erreur ou None)
        """
        if not value:
            return False, "Valeur requise"

        if case_sensitive:
            found = value in valid_choices
        else:
            found = value.lower() in [c.lower() for c in valid_choices]
        if not found:
            return False, f"Valeur invalide: {value}. Choix possibles: {', '.join(valid_choices)}"

        return True, None

    @staticmethod
    def validate_output_path(filepath: str, extensions: Sequence[str]) -> Tuple[bool, Optional[str]]:
        """
        Valide un chemin de sortie (extension attendue, pas un dossier)

        Le dossier parent est créé à l'écriture s'il n'existe pas.
        """
        if not filepath:
            return False, "Aucun fichier spécifié"

        path = Path(filepath)
        if path.exists() and path.is_dir():
            return False, f"Le chemin est un dossier: {filepath}"

        if path.suffix.lower() not in extensions:
            return False, f"Extension invalide. Attendu: {', '.join(extensions)}"

        return True, None

