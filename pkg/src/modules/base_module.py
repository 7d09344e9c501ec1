"""
Classe de base pour toutes les vérifications numériques
"""

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional, Dict, Any, Callable

import numpy as np

from ..core.logger import Logger, LogLevel, get_logger
from ..core.config import ConfigManager
from ..core.constants import CheckStatus, STATUS_ICONS
from ..core.errors import ParameterError


@dataclass
class CheckVerdict:
    """Verdict d'une vérification"""
    check: str
    status: str
    message: str = ""
    params: Dict[str, Any] = field(default_factory=dict)
    metrics: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS

    def summary(self) -> str:
        icon = STATUS_ICONS.get(self.status, "")
        return f"{icon} {self.check}: {self.status.upper()} - {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "status": self.status,
            "passed": self.passed,
            "message": self.message,
            "params": dict(self.params),
            "metrics": dict(self.metrics),
        }


class BaseCheck(ABC):
    """
    Classe de base abstraite des vérifications exposées par la CLI

    Fournit:
    - Métadonnées (identifiant, nom, description)
    - Paramètres par défaut complétés par la configuration du module
    - Système de logging
    - Callbacks de progression et annulation
    """

    # Métadonnées du module (à surcharger)
    MODULE_ID = "base"
    MODULE_NAME = "Vérification de base"
    MODULE_DESCRIPTION = "Description de la vérification"

    # Paramètres acceptés et leurs valeurs par défaut
    DEFAULTS: Dict[str, Any] = {"seed": 7}

    def __init__(
        self,
        config_manager: Optional[ConfigManager] = None,
        logger: Optional[Logger] = None,
        **params
    ):
        self.config = config_manager
        self.logger = logger or get_logger()

        unknown = set(params) - set(self.DEFAULTS)
        if unknown:
            raise ParameterError(f"Paramètres inconnus pour {self.MODULE_ID}: {sorted(unknown)}")

        # Défauts < réglages persistés du module < arguments explicites
        self.params: Dict[str, Any] = dict(self.DEFAULTS)
        for key in self.DEFAULTS:
            stored = self.get_config_value(key)
            if stored is not None:
                self.params[key] = stored
        self.params.update({k: v for k, v in params.items() if v is not None})

        self.status = CheckStatus.PENDING
        self.should_cancel = False
        self._progress_callback: Optional[Callable[[float], None]] = None

    @abstractmethod
    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        """
        Exécute la vérification (à implémenter)

        Returns:
            Dictionnaire de métriques contenant au moins "passed" et "message"
        """
        pass

    @abstractmethod
    def validate_inputs(self) -> tuple[bool, str]:
        """
        Valide les paramètres (à implémenter)

        Returns:
            Tuple (valide, message d'erreur si non valide)
        """
        pass

    def log(self, message: str, level: LogLevel = LogLevel.INFO):
        """Enregistre un message de log"""
        self.logger._log(level, message, source=self.MODULE_ID)

    def log_info(self, message: str):
        self.log(message, LogLevel.INFO)

    def log_success(self, message: str):
        self.log(message, LogLevel.SUCCESS)

    def log_warning(self, message: str):
        self.log(message, LogLevel.WARNING)

    def log_error(self, message: str):
        self.log(message, LogLevel.ERROR)

    def set_progress_callback(self, callback: Callable[[float], None]):
        """Définit le callback de progression (0.0 à 1.0)"""
        self._progress_callback = callback

    def update_progress(self, progress: float):
        if self._progress_callback:
            try:
                self._progress_callback(progress)
            except Exception:
                pass

    def cancel_execution(self):
        """Demande l'arrêt à la prochaine instance"""
        if self.status == CheckStatus.RUNNING:
            self.should_cancel = True
            self.log_warning("Annulation demandée...")

    def is_cancelled(self) -> bool:
        return self.should_cancel

    def run(self) -> CheckVerdict:
        """
        Valide les paramètres puis exécute la vérification

        Raises:
            ParameterError: paramètres invalides
        """
        valid, error = self.validate_inputs()
        if not valid:
            self.log_error(f"Validation échouée: {error}")
            raise ParameterError(error)

        self.status = CheckStatus.RUNNING
        self.should_cancel = False
        self.update_progress(0)
        self.log_info(f"Démarrage de {self.MODULE_NAME} ({self._describe_params()})")

        start = time.perf_counter()
        metrics = self._execute_task(np.random.default_rng(self.params["seed"]))
        elapsed = time.perf_counter() - start

        passed = bool(metrics.pop("passed")) and not self.should_cancel
        message = metrics.pop("message", "")
        if self.should_cancel:
            message = f"Annulé. {message}"
        self.status = CheckStatus.PASS if passed else CheckStatus.FAIL
        self.update_progress(1.0)

        if passed:
            self.log_success(f"{self.MODULE_NAME}: {message}")
        else:
            self.log_error(f"{self.MODULE_NAME} en échec: {message}")

        self.set_config_value("last_status", self.status)
        return CheckVerdict(self.MODULE_ID, self.status, message, dict(self.params), metrics, elapsed)

    def _describe_params(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.params.items())

    def get_config_value(self, key: str, default: Any = None) -> Any:
        """Récupère une valeur de configuration du module"""
        if self.config:
            mod_config = self.config.get_module_config(self.MODULE_ID)
            return mod_config.settings.get(key, default)
        return default

    def set_config_value(self, key: str, value: Any):
        """Définit une valeur de configuration du module"""
        if self.config:
            self.config.set_module_setting(self.MODULE_ID, key, value)

    @classmethod
    def get_metadata(cls) -> Dict[str, Any]:
        """Retourne les métadonnées du module"""
        return {
            "id": cls.MODULE_ID,
            "name": cls.MODULE_NAME,
            "description": cls.MODULE_DESCRIPTION,
            "defaults": dict(cls.DEFAULTS),
        }
