"""
Vérification de l'obfuscateur par masque de Clifford

Correction : l'évaluation par l'oracle G_C rend f(x) sur tout le domaine,
pour chaque Clifford tiré. Mélange : la moyenne de ρ̃ sur les Clifford
tirés est proche de l'état maximalement mélangé.
"""

from typing import Dict, Any

import numpy as np

from .base_module import BaseCheck
from ..core.config import get_config
from ..engine.f2linalg import BitVector, enumerate_vectors
from ..engine.qsio import QuantumImplementation, clifford_otp_obfuscate
from ..utils.stats_utils import StatsUtils
from ..utils.validators import Validators

MIXING_TOLERANCE = 0.02


def random_table_implementation(in_len: int, out_len: int, rng: np.random.Generator) -> QuantumImplementation:
    """Fonction aléatoire encodée par sa table de vérité dans l'état du programme"""
    table = [BitVector.random(out_len, rng) for _ in range(1 << in_len)]
    return QuantumImplementation.from_truth_table(table, name="table")


class OtpCorrectnessCheck(BaseCheck):
    MODULE_ID = "otp-correctness"
    MODULE_NAME = "Masque de Clifford"
    MODULE_DESCRIPTION = "Correction exhaustive et mélange du masque de Clifford"

    DEFAULTS = {"cliffords": 100, "samples": 10000, "lam_pad": 1, "in_len": 1, "seed": 7}

    def validate_inputs(self) -> tuple[bool, str]:
        for key in ("cliffords", "samples"):
            valid, error, _ = Validators.validate_integer(self.params[key], 1)
            if not valid:
                return False, f"{key} invalide ({error})"
        valid, error, lam_pad = Validators.validate_integer(self.params["lam_pad"], 0)
        if not valid:
            return False, f"Remplissage invalide ({error})"
        valid, error, in_len = Validators.validate_integer(self.params["in_len"], 1, 2)
        if not valid:
            return False, f"Longueur d'entrée invalide ({error})"
        # Table de 2^in_len bits plus le remplissage
        cap = get_config().simulation.dense_clifford_cap
        if (1 << in_len) + lam_pad > cap:
            return False, f"Registre obfusqué de {(1 << in_len) + lam_pad} qubits (plafond {cap})"
        return Validators.validate_seed(self.params["seed"])

    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        in_len = int(self.params["in_len"])
        lam_pad = int(self.params["lam_pad"])
        cliffords = int(self.params["cliffords"])
        samples = int(self.params["samples"])
        total = cliffords + samples

        mismatches = 0
        for k in range(cliffords):
            impl = random_table_implementation(in_len, 1, rng)
            expected = [impl.output_distribution(x) for x in enumerate_vectors(in_len)]
            artifact = clifford_otp_obfuscate(impl, lam_pad, rng)
            for x, dist in zip(enumerate_vectors(in_len), expected):
                if dist[artifact.evaluate(x, rng).value] < 1 - 1e-9:
                    mismatches += 1
            self.update_progress((k + 1) / total)

        # ρ̃ ne dépend que de C et de l'état du programme, fixé ici
        impl = random_table_implementation(in_len, 1, rng)
        dim = 1 << (impl.register_qubits + lam_pad)
        average = np.zeros((dim, dim), dtype=np.complex128)
        for k in range(samples):
            if self.is_cancelled():
                samples = k
                break
            average += clifford_otp_obfuscate(impl, lam_pad, rng).state.density_matrix()
            if (k + 1) % 500 == 0:
                self.update_progress((cliffords + k + 1) / total)
        average /= max(samples, 1)
        distance = StatsUtils.trace_distance(average, np.eye(dim) / dim)

        passed = mismatches == 0 and distance <= MIXING_TOLERANCE
        return {
            "passed": passed,
            "message": (f"{mismatches} divergence(s) sur {cliffords} Clifford, "
                        f"distance de trace {distance:.4f} (tolérance {MIXING_TOLERANCE})"),
            "mismatches": mismatches,
            "trace_distance": distance,
            "register_qubits": impl.register_qubits + lam_pad,
        }
