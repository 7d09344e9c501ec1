"""
Chaîne d'hybrides de CP-Expt-Decision

Les quatre hybrides sont joués contre le même adversaire avec audit
d'équivalence fonctionnelle à chaque essai, puis la dernière étape est
rejouée comme réduction vers cUE-Expt.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..core.constants import GameId
from ..core.logger import get_logger
from .harness import Adversary, run_game
from .models import GameConfig, GameResult
from .reductions import DecisionCpReduction

SOURCE = "hybrids"

HYBRIDS = (0, 1, 2, 3)


@dataclass
class DecisionChainReport:
    """Taux des hybrides 0 à 3 et de la réduction terminale"""
    hybrids: List[GameResult] = field(default_factory=list)
    terminal: Optional[GameResult] = None
    audits: int = 0

    @property
    def rates(self) -> List[float]:
        return [r.win_rate for r in self.hybrids]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hybrids": [{"hybrid": h, **r.to_dict()} for h, r in zip(HYBRIDS, self.hybrids)],
            "terminal": self.terminal.to_dict() if self.terminal else None,
            "audits": self.audits,
        }


def hybrid_chain_decision(config: GameConfig, adv: Adversary) -> DecisionChainReport:
    """
    Hybrides 0 à 3 puis réduction vers cUE-Expt

    Les audits H1 ≡ f et H3 ≡ H2 couvrent tout le domaine de la PRF ;
    une divergence lève EquivalenceFailure avec l'entrée témoin.
    """
    logger = get_logger()
    report = DecisionChainReport()
    for hybrid in HYBRIDS:
        hybrid_config = replace(config, game=GameId.CP_DECISION, hybrid=hybrid, audit_equivalence=True)
        report.hybrids.append(run_game(hybrid_config, adv))
        if hybrid in (1, 3):
            report.audits += hybrid_config.trials

    reduction = DecisionCpReduction(adv, config.prf_input_len, config.prf_output_len,
                                    config.prf_seed_len, config.lam)
    terminal_config = reduction.target_config(config.trials, config.seed, workers=config.workers,
                                              keep_records=config.keep_records)
    report.terminal = run_game(terminal_config, reduction)

    logger.info(
        "Chaîne décisionnelle: " + ", ".join(f"H{h}={r:.4f}" for h, r in zip(HYBRIDS, report.rates))
        + f", cUE={report.terminal.win_rate:.4f}", SOURCE
    )
    return report
