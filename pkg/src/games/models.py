"""
Modèles de données des jeux de sécurité
Configuration d'un jeu, messages échangés avec l'adversaire et résultats
"""

from dataclasses import dataclass, field, asdict, replace
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from ..core.config import PresetConfig
from ..core.constants import GameId
from ..core.errors import ParameterError
from ..engine.f2linalg import BitMatrix, BitVector
from ..engine.qsim import StateVector
from ..engine.unclonable import CompiledScheme, CueScheme, UeScheme, compile_key_testing
from ..utils.stats_utils import StatsUtils

SEED_MAX = (1 << 64) - 1


@dataclass
class GameConfig:
    """Paramètres d'une expérience de sécurité"""
    game: str
    trials: int = 1000
    seed: int = 7

    # Rand-Expt / Search-Expt : n et λ ; UE / cUE : λ
    n: int = 0
    lam: int = 1
    msg_len: int = 8

    # Schéma : "full" (λ′ déduit de λ) ou "toy" (masques Ux/Vx directs)
    scheme: str = "full"
    toy_state_len: int = 2
    toy_pad_rows: int = 1
    key_testing: bool = False
    outer_key_len: Optional[int] = None
    # UE-Expt à message d'un bit : σ = Enc(sk; c)
    ue_bit_variant: bool = False

    # Programmes
    prf_input_len: int = 8
    prf_output_len: int = 8
    prf_seed_len: int = 16
    mac_prefix_len: int = 8
    ptfunc_lambda: int = 4
    hybrid: int = 0
    audit_equivalence: bool = False

    # Mode truqué (tests) : la chaîne cachée est transmise à l'adversaire
    leak_secret: bool = False

    keep_records: bool = False
    workers: Optional[int] = None

    @classmethod
    def from_preset(cls, game: str, preset: PresetConfig, **overrides) -> "GameConfig":
        """Construit la configuration d'un jeu depuis un preset nommé"""
        n, lam = 0, 1
        if game == GameId.RAND:
            n, lam = preset.rand_n, preset.rand_lambda
        elif game == GameId.SEARCH:
            n, lam = preset.search_n, preset.search_lambda
        elif game == GameId.UE:
            lam = preset.ue_lambda
        elif game in (GameId.CUE, GameId.CP_DECISION):
            lam = preset.cue_lambda
        elif game == GameId.CP_SEARCH:
            lam = preset.ue_lambda
        base = cls(
            game=game, n=n, lam=lam, msg_len=preset.msg_len, scheme=preset.scheme,
            toy_state_len=preset.toy_state_len, toy_pad_rows=preset.toy_pad_rows,
            prf_input_len=preset.prf_input_len, prf_output_len=preset.prf_output_len,
            prf_seed_len=preset.prf_seed_len, mac_prefix_len=preset.mac_prefix_len,
            ptfunc_lambda=preset.ptfunc_lambda,
        )
        return replace(base, **overrides)

    def validate(self) -> None:
        """Lève ParameterError si les paramètres sortent des domaines du jeu"""
        if self.game not in GameId.ALL:
            raise ParameterError(f"Jeu inconnu: {self.game}")
        if self.trials < 1:
            raise ParameterError(f"Nombre d'essais invalide: {self.trials}")
        if not 0 <= self.seed <= SEED_MAX:
            raise ParameterError(f"Graine hors de [0, 2^64): {self.seed}")
        if self.n < 0 or self.lam < 0 or self.msg_len < 0:
            raise ParameterError(f"Paramètres négatifs: n={self.n}, λ={self.lam}, msg_len={self.msg_len}")
        if self.game in (GameId.RAND, GameId.SEARCH) and 10 * self.n + self.lam < 1:
            raise ParameterError("10n + λ doit valoir au moins 1")
        if self.scheme not in ("full", "toy"):
            raise ParameterError(f"Schéma inconnu: {self.scheme}")
        if not 0 <= self.hybrid <= 3:
            raise ParameterError(f"Hybride {self.hybrid} hors de [0, 3]")
        if self.game in (GameId.UE, GameId.CUE):
            self.build_scheme()
            if self.scheme == "toy" and not self.ue_bit_variant and self.msg_len != self.toy_pad_rows:
                raise ParameterError(
                    f"Schéma toy : messages de {self.toy_pad_rows} bits, pas {self.msg_len}"
                )
        if self.game == GameId.CP_DECISION and self.hybrid >= 1:
            self.decision_scheme()

    @property
    def length(self) -> int:
        """Longueur de l'état |x^θ⟩ de Rand-Expt / Search-Expt"""
        return 10 * self.n + self.lam

    def build_scheme(self):
        """Schéma UE ou cUE du jeu, compilé avec test de clé si demandé"""
        coupled = self.game in (GameId.CUE, GameId.CP_DECISION)
        family = CueScheme if coupled else UeScheme
        if self.scheme == "toy":
            base = family.toy(self.toy_state_len, self.toy_pad_rows)
        else:
            base = family.full(self.lam)
        if self.key_testing:
            return compile_key_testing(base, self.outer_key_len)
        return base

    def decision_scheme(self) -> CompiledScheme:
        """cUE compilé des hybrides : clés externes dans le domaine de la PRF"""
        return compile_key_testing(CueScheme.full(self.lam), self.prf_input_len)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# =============================================================================
# Messages du jeu
# =============================================================================

@dataclass
class PartyRegisters:
    """Qubits et objets classiques ou quantiques attribués à une partie"""
    qubits: Tuple[int, ...] = ()
    items: Dict[str, Any] = field(default_factory=dict)


@dataclass
class PirateInput:
    """Ce que reçoit l'adversaire en phase 1"""
    game: str
    public: Dict[str, Any]
    state: Optional[StateVector] = None
    objects: Dict[str, Any] = field(default_factory=dict)
    leaked: Optional[Dict[str, Any]] = None


@dataclass
class PirateSplit:
    """État joint ρ_AB et partage des registres entre A et B"""
    state: StateVector
    a: PartyRegisters
    b: PartyRegisters
    note: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Challenge:
    """Clé ou défi remis à une partie pour sa mesure"""
    party: str
    data: Dict[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.data[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.data.get(key, default)


@dataclass
class PartyAnswer:
    """Réponse annotée d'une partie (les notes rejoignent l'enregistrement)"""
    value: Any
    note: Dict[str, Any] = field(default_factory=dict)


# =============================================================================
# Résultats
# =============================================================================

def _plain(value: Any) -> Any:
    """Représentation sérialisable des valeurs d'un essai"""
    if isinstance(value, BitVector):
        return value.to_string()
    if isinstance(value, BitMatrix):
        return [row.to_string() for row in value.row_vectors()]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    return repr(value)


@dataclass
class TrialRecord:
    """Déroulé d'un essai"""
    index: int
    win: bool = False
    violation: Optional[str] = None
    a_correct: bool = False
    b_correct: bool = False
    secrets: Dict[str, Any] = field(default_factory=dict)
    answers: Dict[str, Any] = field(default_factory=dict)
    notes: Dict[str, Any] = field(default_factory=dict)

    def to_row(self) -> Dict[str, Any]:
        row = {
            "trial": self.index,
            "win": self.win,
            "a_correct": self.a_correct,
            "b_correct": self.b_correct,
            "violation": self.violation or "",
        }
        for prefix, values in (("secret", self.secrets), ("answer", self.answers), ("note", self.notes)):
            for key, value in values.items():
                plain = _plain(value)
                row[f"{prefix}_{key}"] = plain if not isinstance(plain, (list, dict)) else str(plain)
        return row


@dataclass
class GameResult:
    """Agrégat d'une expérience"""
    game: str
    adversary: str
    wins: int
    trials: int
    violations: int = 0
    a_correct: int = 0
    b_correct: int = 0
    a_only: int = 0
    b_only: int = 0
    elapsed: float = 0.0
    records: List[TrialRecord] = field(default_factory=list)

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials if self.trials else 0.0

    @property
    def interval(self) -> Tuple[float, float]:
        return StatsUtils.wilson_interval(self.wins, self.trials)

    def rate(self, count: int) -> float:
        return count / self.trials if self.trials else 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Partie déterministe ; la durée est publiée dans run_info par la CLI"""
        low, high = self.interval
        return {
            "game": self.game,
            "adversary": self.adversary,
            "wins": self.wins,
            "trials": self.trials,
            "win_rate": self.win_rate,
            "interval": [low, high],
            "violations": self.violations,
            "tallies": {
                "a_correct": self.a_correct,
                "b_correct": self.b_correct,
                "a_only": self.a_only,
                "b_only": self.b_only,
            },
        }

    def to_dataframe(self) -> pd.DataFrame:
        """Table des essais (vide si les enregistrements n'ont pas été conservés)"""
        return pd.DataFrame([r.to_row() for r in self.records])


def unwrap_answer(answer: Any) -> Tuple[Any, Dict[str, Any]]:
    """Valeur et notes d'une réponse, annotée ou brute"""
    if isinstance(answer, PartyAnswer):
        return answer.value, dict(answer.note)
    return answer, {}
