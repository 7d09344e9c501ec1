"""
Vérification de l'écart purifié entre les oracles G′ et G

Registre de programme d'un qubit, un qubit de remplissage, aucune entrée :
le registre de Clifford parcourt le groupe entier sur deux qubits.
"""

from typing import Dict, Any

import numpy as np

from .base_module import BaseCheck
from ..engine.qsim import random_unitary
from ..engine.qsio import (
    projected_branch_weight,
    projected_branch_weight_formula,
    purified_gap_bound,
    purified_hybrid_gap,
)
from ..utils.validators import Validators

LAM_PAD = 1
ADV_DIM = 16
WEIGHT_TOL = 1e-9
MAX_QUERIES = 3


class PurifiedGapCheck(BaseCheck):
    MODULE_ID = "purified-gap"
    MODULE_NAME = "Écart des hybrides purifiés"
    MODULE_DESCRIPTION = "Borne q(q+1)·2^-λ de l'écart et poids de la branche projetée"

    DEFAULTS = {"queries": 3, "unitaries": 10, "weight_unitaries": 100, "seed": 7}

    def validate_inputs(self) -> tuple[bool, str]:
        valid, error, _ = Validators.validate_integer(self.params["queries"], 0, MAX_QUERIES)
        if not valid:
            return False, f"Nombre de requêtes invalide ({error})"
        for key in ("unitaries", "weight_unitaries"):
            valid, error, _ = Validators.validate_integer(self.params[key], 1)
            if not valid:
                return False, f"{key} invalide ({error})"
        return Validators.validate_seed(self.params["seed"])

    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        queries = int(self.params["queries"])
        unitaries = int(self.params["unitaries"])
        weight_unitaries = int(self.params["weight_unitaries"])
        total = unitaries + weight_unitaries

        gaps = {q: 0.0 for q in range(queries + 1)}
        violations = []
        for k in range(unitaries):
            if self.is_cancelled():
                break
            adv = random_unitary(ADV_DIM, rng)
            for q in range(queries + 1):
                for b in (0, 1):
                    gap = purified_hybrid_gap(q, adv, b)
                    gaps[q] = max(gaps[q], gap)
                    if gap > purified_gap_bound(q, LAM_PAD) + WEIGHT_TOL:
                        violations.append({"unitary": k, "q": q, "b": b, "gap": gap})
            self.update_progress((k + 1) / total)

        max_weight = 0.0
        max_formula = 0.0
        for k in range(weight_unitaries):
            if self.is_cancelled():
                break
            adv = random_unitary(ADV_DIM, rng)
            max_weight = max(max_weight, projected_branch_weight(adv))
            max_formula = max(max_formula, projected_branch_weight_formula(adv, lam_pad=LAM_PAD))
            self.update_progress((unitaries + k + 1) / total)

        weight_bound = 2.0 ** (-LAM_PAD)
        passed = not violations and max_weight <= weight_bound + WEIGHT_TOL and not self.is_cancelled()
        return {
            "passed": passed,
            "message": (f"écart max par q {', '.join(f'{q}:{g:.4f}' for q, g in gaps.items())}, "
                        f"poids projeté max {max_weight:.4f} (borne {weight_bound})"),
            "max_gap": {str(q): g for q, g in gaps.items()},
            "bounds": {str(q): purified_gap_bound(q, LAM_PAD) for q in gaps},
            "violations": violations,
            "max_projected_weight": max_weight,
            "max_projected_weight_formula": max_formula,
        }
