"""
Vérification de la formule de Goldreich-Levin simultanée

Pour chaque instance : familles de mesures de Haar sur les registres de A
et de B, état joint aléatoire, chaîne cachée x. La probabilité exacte que
les deux extractions rendent x est comparée à la fréquence observée.
"""

from typing import Dict, Any

import numpy as np

from .base_module import BaseCheck
from ..engine.f2linalg import BitVector
from ..engine.glreduce import GlInstance, random_projective_family
from ..engine.qsim import StateVector
from ..utils.stats_utils import StatsUtils
from ..utils.validators import Validators

MAX_BITS = 3


def random_gl_instance(bits: int, rng: np.random.Generator, register_len: int = 1) -> GlInstance:
    """A tient les qubits [0, k), B les qubits [k, 2k)"""
    register_a = list(range(register_len))
    register_b = list(range(register_len, 2 * register_len))
    return GlInstance(
        family_a=random_projective_family(bits, register_a, rng),
        family_b=random_projective_family(bits, register_b, rng),
        state=StateVector.random(2 * register_len, rng),
        x=BitVector.random(bits, rng),
    )


class GlCheck(BaseCheck):
    MODULE_ID = "gl"
    MODULE_NAME = "Formule GL simultanée"
    MODULE_DESCRIPTION = "Formule exacte contre fréquence empirique d'extraction conjointe (3σ)"

    DEFAULTS = {"bits": 2, "instances": 50, "runs": 10000, "seed": 7}

    def validate_inputs(self) -> tuple[bool, str]:
        valid, error, _ = Validators.validate_integer(self.params["bits"], 1, MAX_BITS)
        if not valid:
            return False, f"Nombre de bits invalide ({error})"
        for key in ("instances", "runs"):
            valid, error, _ = Validators.validate_integer(self.params[key], 1)
            if not valid:
                return False, f"{key} invalide ({error})"
        return Validators.validate_seed(self.params["seed"])

    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        bits = int(self.params["bits"])
        instances = int(self.params["instances"])
        runs = int(self.params["runs"])

        worst = 0.0
        failures = []
        done = 0
        for k in range(instances):
            if self.is_cancelled():
                break
            instance = random_gl_instance(bits, rng)
            exact = instance.formula()
            observed = instance.empirical(runs, rng)
            sigma = StatsUtils.sigma(exact, runs)
            deviation = abs(observed - exact) / sigma if sigma > 0 else 0.0
            worst = max(worst, deviation)
            if not StatsUtils.within_sigma(observed, exact, runs):
                failures.append({"instance": k, "formula": exact, "empirical": observed})
                self.log_warning(f"Instance {k}: formule {exact:.4f}, observé {observed:.4f}")
            done += 1
            self.update_progress(done / instances)

        return {
            "passed": done == instances and not failures,
            "message": f"{done - len(failures)}/{done} instances dans 3σ (écart max {worst:.2f}σ)",
            "instances": done,
            "failures": failures,
            "max_deviation_sigma": worst,
        }
