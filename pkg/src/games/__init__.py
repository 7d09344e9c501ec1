# Jeux de sécurité
from .models import GameConfig, GameResult, PartyAnswer, PartyRegisters, PirateInput, PirateSplit
from .harness import Adversary, run_game
from .adversaries import OmniscientPredictor, builtin_adversary
from .reductions import (
    best_possible_wrapper, cue_to_rand, decision_cp, ptfunc, rand_to_search, search_cp, search_guess
)
from .hybrids import hybrid_chain_decision
