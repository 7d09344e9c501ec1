"""
Vérification de la chaîne d'hybrides de CP-Expt-Decision
Audits d'équivalence fonctionnelle H1 ≡ f et H3 ≡ H2 à chaque essai
"""

from typing import Dict, Any

import numpy as np

from .base_module import BaseCheck
from ..core.config import PresetConfig, load_presets
from ..core.constants import BUILTIN_ADVERSARIES, GameId
from ..core.errors import ConfigError, EquivalenceFailure
from ..games import GameConfig, builtin_adversary, hybrid_chain_decision
from ..utils.stats_utils import StatsUtils
from ..utils.validators import Validators

# Taux joint attendu de deux réponses au hasard
RANDOM_GUESS_RATE = 0.25


class HybridDecisionCheck(BaseCheck):
    MODULE_ID = "hybrid-decision"
    MODULE_NAME = "Hybrides CP décisionnels"
    MODULE_DESCRIPTION = "Équivalences fonctionnelles exhaustives des hybrides 1 et 3"

    DEFAULTS = {"preset": "toy", "adversary": "random_guess", "trials": 100, "seed": 7, "workers": None}

    def _presets(self) -> Dict[str, PresetConfig]:
        """Presets du fichier configuré, sinon les presets épinglés"""
        return self.config.presets() if self.config else load_presets()

    def validate_inputs(self) -> tuple[bool, str]:
        try:
            presets = sorted(self._presets())
        except ConfigError as e:
            return False, str(e)
        for value, choices in ((self.params["preset"], presets),
                               (self.params["adversary"], BUILTIN_ADVERSARIES)):
            valid, error = Validators.validate_choice(value, choices)
            if not valid:
                return False, error
        valid, error = Validators.validate_trials(self.params["trials"])
        if not valid:
            return False, error
        return Validators.validate_seed(self.params["seed"])

    def _execute_task(self, rng: np.random.Generator) -> Dict[str, Any]:
        config = GameConfig.from_preset(
            GameId.CP_DECISION, self._presets()[self.params["preset"]],
            trials=int(self.params["trials"]), seed=int(self.params["seed"]),
            workers=self.params["workers"],
        )
        adversary = self.params["adversary"]
        try:
            report = hybrid_chain_decision(config, builtin_adversary(adversary))
        except EquivalenceFailure as e:
            return {
                "passed": False,
                "message": f"divergence fonctionnelle en {e.witness}",
                "witness": str(e.witness),
            }

        metrics = {"audits": report.audits, "chain": report.to_dict()}
        rates = report.rates + [report.terminal.win_rate]
        message = f"{report.audits} audits sans divergence, taux " + ", ".join(f"{r:.4f}" for r in rates)
        passed = True
        if adversary == "random_guess":
            passed = all(StatsUtils.within_sigma(r, RANDOM_GUESS_RATE, config.trials) for r in rates)
            metrics["expected_rate"] = RANDOM_GUESS_RATE
            if not passed:
                message += f" (hors de 3σ autour de {RANDOM_GUESS_RATE})"
        return {"passed": passed, "message": message, **metrics}
