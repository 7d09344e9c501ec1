"""
Hiérarchie d'exceptions du laboratoire UnclonableLab
"""

from typing import Any, Optional


class LabError(Exception):
    """Erreur de base de l'application"""


class DimensionError(LabError, ValueError):
    """Longueurs ou dimensions incompatibles"""


class NonUnitaryError(LabError, ValueError):
    """Matrice fournie non unitaire"""


class SizeCapError(LabError):
    """Dépassement d'un plafond de taille (qubits, énumération)"""

    def __init__(self, what: str, requested: int, cap: int):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what}: {requested} dépasse le plafond {cap}")


class InfeasibleConstraintError(LabError):
    """Contraintes d'échantillonnage impossibles à satisfaire"""


class ParameterError(LabError, ValueError):
    """Paramètre de schéma invalide (λ trop petit, preset incohérent...)"""


class ProtocolViolation(LabError):
    """Un adversaire n'a pas respecté le protocole d'un jeu"""

    def __init__(self, reason: str, party: Optional[str] = None):
        self.reason = reason
        self.party = party
        prefix = f"[{party}] " if party else ""
        super().__init__(f"{prefix}{reason}")


class EquivalenceFailure(LabError):
    """Deux programmes diffèrent sur une entrée témoin"""

    def __init__(self, witness: Any, left: Any, right: Any):
        self.witness = witness
        self.left = left
        self.right = right
        super().__init__(f"Divergence en {witness}: {left} != {right}")


class OperatorBoundError(LabError, ValueError):
    """Opérateur hors de l'intervalle 0 <= P <= 1"""


class ConfigError(LabError):
    """Erreur de configuration ou de preset"""
