# Vérifications numériques
from typing import Dict, Type

from .base_module import BaseCheck, CheckVerdict
from .twirl_check import TwirlCheck
from .gl_check import GlCheck
from .hybrid_check import HybridDecisionCheck
from .otp_check import OtpCorrectnessCheck
from .purified_check import PurifiedGapCheck
from ..core.errors import ParameterError

CHECKS: Dict[str, Type[BaseCheck]] = {
    cls.MODULE_ID: cls
    for cls in (TwirlCheck, GlCheck, HybridDecisionCheck, OtpCorrectnessCheck, PurifiedGapCheck)
}


def get_check(check_id: str) -> Type[BaseCheck]:
    """Classe de vérification par identifiant"""
    if check_id not in CHECKS:
        raise ParameterError(f"Vérification inconnue: {check_id} (disponibles: {', '.join(CHECKS)})")
    return CHECKS[check_id]
