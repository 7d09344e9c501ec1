"""
Utilitaires statistiques pour UnclonableLab
Intervalles de confiance, critères 3σ et tests d'uniformité
"""

import math
from typing import Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import erfc

from ..core.constants import CHI2_SIGNIFICANCE, SIGMA_THRESHOLD


class StatsUtils:
    """Classe utilitaire pour l'acceptation statistique des taux"""

    @staticmethod
    def wilson_interval(wins: int, trials: int, z: float = 1.96) -> Tuple[float, float]:
        """
        Intervalle de Wilson à 95 %

        Returns:
            Tuple (borne basse, borne haute) ; (0, 1) sans essai
        """
        if trials <= 0:
            return 0.0, 1.0
        p = wins / trials
        denom = 1 + z * z / trials
        center = (p + z * z / (2 * trials)) / denom
        half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
        return max(0.0, center - half), min(1.0, center + half)

    @staticmethod
    def sigma(p: float, trials: int) -> float:
        """Écart-type d'une fréquence binomiale"""
        return math.sqrt(p * (1 - p) / trials) if trials > 0 else float("inf")

    @staticmethod
    def within_sigma(observed: float, expected: float, trials: int,
                     k: float = SIGMA_THRESHOLD) -> bool:
        """|observé − attendu| ≤ kσ (plancher 1/trials pour les taux dégénérés)"""
        width = max(k * StatsUtils.sigma(expected, trials), 1.0 / max(trials, 1))
        return abs(observed - expected) <= width

    @staticmethod
    def chi_square_uniform(counts: Sequence[int],
                           significance: float = CHI2_SIGNIFICANCE) -> Tuple[bool, float]:
        """
        Test du χ² d'uniformité

        Returns:
            Tuple (uniformité acceptée, p-valeur)
        """
        counts = np.asarray(counts, dtype=np.float64)
        result = stats.chisquare(counts)
        return bool(result.pvalue >= significance), float(result.pvalue)

    @staticmethod
    def chi_square_same_distribution(left: Sequence[int], right: Sequence[int],
                                     significance: float = CHI2_SIGNIFICANCE) -> Tuple[bool, float]:
        """Test d'homogénéité de deux histogrammes (catégories vides ignorées)"""
        table = np.array([left, right], dtype=np.float64)
        table = table[:, table.sum(axis=0) > 0]
        if table.shape[1] < 2:
            return True, 1.0
        result = stats.chi2_contingency(table)
        return bool(result.pvalue >= significance), float(result.pvalue)

    @staticmethod
    def monobit_test(bits: Sequence[int], significance: float = CHI2_SIGNIFICANCE) -> Tuple[bool, float]:
        """Test de fréquence monobit : p = erfc(|S_n| / √(2n))"""
        bits = np.asarray(bits, dtype=np.int64)
        if bits.size == 0:
            return True, 1.0
        s = float(np.sum(2 * bits - 1))
        pvalue = float(erfc(abs(s) / math.sqrt(2 * bits.size)))
        return pvalue >= significance, pvalue

    @staticmethod
    def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
        """½ ‖ρ − σ‖₁ pour des matrices hermitiennes"""
        diff = np.asarray(rho) - np.asarray(sigma)
        return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
