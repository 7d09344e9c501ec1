"""
Vérification du twirl de Clifford
Σ_C C† P′ C ρ C† P C = 0 pour toute paire de Pauli distincts
"""

from typing import Dict, Any

import numpy as np

from .base_module import BaseCheck
from ..core.config import get_config
from ..core.constants import NORM_TOL
from ..engine.qsim import StateVector, twirl_sum
from ..utils.validators import Validators

# Instances par défaut selon la taille du groupe énuméré
DEFAULT_INSTANCES = {1: 1000, 2: 100}


def distinct_pauli_pair(n: int, rng: np.random.Generator):
    """Deux Pauli (x, z) distincts, bits empaquetés"""
    count = 4 ** n
    first = int(rng.integers(count))
    second = (first + 1 + int(rng.integers(count - 1))) % count
    mask = (1 << n) - 1
    return (first >> n, first & mask), (second >> n, second & mask)


class TwirlCheck(BaseCheck):
    """Norme de Frobenius du twirl sur des instances aléatoires (paire, état)"""

    MODULE_ID = "twirl"
    MODULE_NAME = "Twirl de Clifford"
    MODULE_DESCRIPTION = "Le twirl de deux Pauli distincts sur le groupe entier est nul"

    DEFAULTS = {"qubits": 1, "instances": None, "seed": 7}

    def validate_inputs(self) -> tuple[bool, str]:
        cap = get_config().simulation.twirl_enumeration_cap
        valid, error = Validators.validate_qubits(self.params["qubits"], range(1, cap + 1))
        if not valid:
            return False, error
        if self.params["instances"] is not None:
            valid, error, _ = Validators.validate_integer(self.params["instances"], 1)
            if not valid:
                return False, f"Nombre d'instances invalide ({error})"
        return Validators.validate_seed(self.params["seed"])

    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        n = int(self.params["qubits"])
        instances = self.params["instances"] or DEFAULT_INSTANCES.get(n, 100)

        norms = []
        for k in range(instances):
            if self.is_cancelled():
                break
            p1, p2 = distinct_pauli_pair(n, rng)
            psi = StateVector.random(n, rng)
            norms.append(float(np.linalg.norm(twirl_sum(n, p1, p2, psi))))
            self.update_progress((k + 1) / instances)

        max_norm = max(norms) if norms else 0.0
        passed = len(norms) == instances and max_norm < NORM_TOL
        return {
            "passed": passed,
            "message": f"norme de Frobenius max {max_norm:.3e} sur {len(norms)} instances",
            "instances": len(norms),
            "max_frobenius_norm": max_norm,
            "tolerance": NORM_TOL,
        }
