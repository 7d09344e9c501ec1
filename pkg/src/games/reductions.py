"""
Réductions des preuves, exécutables comme adversaires

Chaque réduction enveloppe un adversaire interne : elle reçoit l'entrée
du jeu cible, fabrique celle du jeu simulé, transmet la phase 1, puis
traduit les défis et les réponses de chaque partie. Les données propres à
la réduction passent aux parties comme objets classiques préfixés red_.

target_config() donne la configuration du jeu cible prévue par la preuve.
"""

from dataclasses import replace
from typing import Any, Dict, Optional

import numpy as np

from ..core.config import PresetConfig, get_config
from ..core.constants import GameId
from ..core.errors import DimensionError, ProtocolViolation
from ..engine.crypto import KEY_HEADER_BITS, GgmKey, encode_ggm_key, ggm_eval, mac_verify
from ..engine.f2linalg import BitMatrix, BitVector, sample_rank_constrained
from ..engine.programs import (
    PlainProgram, coset_pair, make_point_coset, make_search_patched, make_tilde_patched
)
from ..engine.qsio import OpaqueProgram, wrap_opaque
from ..engine.unclonable import CueScheme, fabricate_cue_key
from .harness import Adversary, coin, rebuild_ciphertext
from .models import (
    Challenge, GameConfig, PartyAnswer, PartyRegisters, PirateInput, PirateSplit, unwrap_answer
)


def _extend(split: PirateSplit, items_a: Dict[str, Any], items_b: Dict[str, Any],
            note: Dict[str, Any]) -> PirateSplit:
    """Ajoute les objets classiques de la réduction au partage de l'adversaire interne"""
    if not isinstance(split, PirateSplit):
        raise ProtocolViolation(f"Phase 1 interne: PirateSplit attendu, pas {type(split).__name__}")
    return PirateSplit(
        split.state,
        PartyRegisters(split.a.qubits, {**split.a.items, **items_a}),
        PartyRegisters(split.b.qubits, {**split.b.items, **items_b}),
        {**split.note, **note},
    )


def _inner_bit(answer: Any, party: str):
    value, notes = unwrap_answer(answer)
    if not isinstance(value, (bool, int, np.integer)) or int(value) not in (0, 1):
        raise ProtocolViolation(f"Réponse interne {value!r} : un bit est attendu", party)
    return int(value), notes


class Reduction(Adversary):
    """Adversaire construit autour d'un adversaire interne"""

    label = "reduction"

    def __init__(self, inner: Adversary):
        self.inner = inner
        self.name = f"{self.label}({getattr(inner, 'name', type(inner).__name__)})"

    def choose_messages(self, game, lengths, rng):
        return self.inner.choose_messages(game, lengths, rng)


# =============================================================================
# Search-Expt(n, λ) -> Search-Expt(0, 10n+λ) : deviner Ux et Vx
# =============================================================================

class SearchGuessReduction(Reduction):
    """
    Joue Search-Expt(0, 10n+λ) en devinant les valeurs publiques

    r, s ← {0,1}^n sont remis à l'adversaire interne comme Ux et Vx ;
    U et V, tirées ensuite, complètent les défis de A et de B. Les notes
    de l'essai conservent r, s, U et V pour conditionner sur les bonnes
    devinettes.
    """

    label = "search_guess"

    def __init__(self, inner: Adversary, n: int = 1, lam: int = 1):
        super().__init__(inner)
        self.n = n
        self.lam = lam

    def target_config(self, trials=1000, seed=7, **overrides):
        return GameConfig(game=GameId.SEARCH, trials=trials, seed=seed,
                          n=0, lam=10 * self.n + self.lam, **overrides)

    def phase1(self, received, rng):
        length = received.state.num_qubits
        lam = length - 10 * self.n
        if lam < 0:
            raise ProtocolViolation(f"État de {length} qubits pour n={self.n}")
        r = BitVector.random(self.n, rng)
        s = BitVector.random(self.n, rng)
        simulated = PirateInput(GameId.SEARCH, {"n": self.n, "lam": lam, "r": r, "s": s},
                                received.state, received.objects, received.leaked)
        split = self.inner.phase1(simulated, rng)
        U = BitMatrix.random(self.n, length, rng)
        V = BitMatrix.random(self.n, length, rng)
        return _extend(split, {"red_U": U}, {"red_V": V},
                       {"guess_r": r, "guess_s": s, "U": U, "V": V})

    def measure_A(self, challenge, view, rng):
        simulated = Challenge("A", {"theta": challenge["theta"], "matrix": view.item("red_U")})
        return self.inner.measure_A(simulated, view, rng)

    def measure_B(self, challenge, view, rng):
        simulated = Challenge("B", {"theta": challenge["theta"], "matrix": view.item("red_V")})
        return self.inner.measure_B(simulated, view, rng)


def guess_correct(notes: Dict[str, Any], x: BitVector) -> bool:
    """Les valeurs devinées valent-elles Ux et Vx ?"""
    return notes["U"] @ x == notes["guess_r"] and notes["V"] @ x == notes["guess_s"]


# =============================================================================
# Rand-Expt -> Search-Expt : extraction GL ligne par ligne
# =============================================================================

def spliced_rows(real: BitMatrix, fresh: BitMatrix, i: int) -> Dict[int, BitVector]:
    """Lignes fixées de [U_{<i} ‖ u ‖ Ũ_{>i}] : vraies avant i, fraîches après"""
    if real.rows != fresh.rows or real.cols != fresh.cols:
        raise DimensionError(f"Matrices {real.rows}x{real.cols} et {fresh.rows}x{fresh.cols}")
    if not 0 <= i < real.rows:
        raise DimensionError(f"Ligne libre {i} hors de [0, {real.rows})")
    rows = {j: real.row(j) for j in range(i)}
    rows.update({j: fresh.row(j) for j in range(i + 1, real.rows)})
    return rows


class RandToSearchReduction(Reduction):
    """
    Gagne Search-Expt à partir d'un distingueur de Rand-Expt

    L'adversaire interne reçoit r = Ux et s = Vx. Chaque partie tire une
    ligne i, une matrice Ũ fraîche, et applique l'extraction GL à la
    famille {A^{θ,[U_{<i} ‖ u ‖ Ũ_{>i}]}}_u exposée par l'adversaire
    interne ; le résultat est sa réponse x.
    """

    label = "rand_to_search"

    def __init__(self, inner: Adversary, n: int = 1, lam: int = 1):
        super().__init__(inner)
        self.n = n
        self.lam = lam

    def target_config(self, trials=1000, seed=7, **overrides):
        return GameConfig(game=GameId.SEARCH, trials=trials, seed=seed,
                          n=self.n, lam=self.lam, **overrides)

    def phase1(self, received, rng):
        simulated = PirateInput(GameId.RAND, dict(received.public), received.state,
                                received.objects, received.leaked)
        return _extend(self.inner.phase1(simulated, rng), {}, {}, {})

    def _extract(self, party: str, challenge: Challenge, view, rng):
        matrix: BitMatrix = challenge["matrix"]
        theta: BitVector = challenge["theta"]
        if matrix.rows < 1:
            raise ProtocolViolation("Extraction ligne par ligne impossible sans ligne (n = 0)", party)
        i = int(rng.integers(matrix.rows))
        fresh = BitMatrix.random(matrix.rows, matrix.cols, rng)
        family = self.inner.coherent_measure(party, theta, spliced_rows(matrix, fresh, i), i, view, rng)
        if family.index_len != theta.length:
            raise ProtocolViolation(
                f"Famille indexée sur {family.index_len} bits au lieu de {theta.length}", party
            )
        w = view.gl_extract(family, rng)
        return PartyAnswer(w, {f"{party}_row": i})

    def measure_A(self, challenge, view, rng):
        return self._extract("A", challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self._extract("B", challenge, view, rng)


# =============================================================================
# cUE-Expt -> Rand-Expt(λ′, λ′) : fabrication des clés
# =============================================================================

class CueToRandReduction(Reduction):
    """
    Joue Rand-Expt(λ′, λ′) avec un adversaire du cUE (λ = 23 : λ′ = 1)

    Le chiffré simulé est (|x^θ′⟩, T, m_A ⊕ PRG(r), m_B ⊕ PRG(s)) ; au défi
    (θ′, U) la partie A fabrique sk_A avec Tθ_A = θ′, le bit d partagé
    choisissant laquelle des deux solutions revient à A.
    """

    label = "cue_to_rand"

    def __init__(self, inner: Adversary, lam: int = 23, msg_len: int = 8):
        super().__init__(inner)
        self.lam = lam
        self.msg_len = msg_len
        self.scheme = CueScheme.full(lam)

    def target_config(self, trials=1000, seed=7, **overrides):
        rows = self.scheme.rows
        return GameConfig(game=GameId.RAND, trials=trials, seed=seed, n=rows, lam=rows, **overrides)

    def phase1(self, received, rng):
        scheme = self.scheme
        if received.state.num_qubits != scheme.state_len:
            raise ProtocolViolation(
                f"État de {received.state.num_qubits} qubits pour un cUE sur {scheme.state_len}"
            )
        lengths = {"m_A": self.msg_len, "m_B": self.msg_len}
        messages = self.inner.choose_messages(GameId.CUE, lengths, rng)
        for key, length in lengths.items():
            if not isinstance(messages.get(key), BitVector) or messages[key].length != length:
                raise ProtocolViolation(f"Message interne {key} : {length} bits attendus")

        T = sample_rank_constrained(
            scheme.state_len, scheme.theta_len, None, scheme.state_len, rng,
            max_attempts=get_config().simulation.sampler_max_attempts,
        )
        pad_a = messages["m_A"] ^ scheme.pad_stream(received.public["r"], self.msg_len)
        pad_b = messages["m_B"] ^ scheme.pad_stream(received.public["s"], self.msg_len)
        d = coin(rng)
        public = {"scheme": scheme, "T": T, "pad_A": pad_a, "pad_B": pad_b,
                  "params": (scheme.key_len, scheme.rows, self.msg_len, self.msg_len)}
        simulated = PirateInput(GameId.CUE, public, received.state, {}, received.leaked)
        split = self.inner.phase1(simulated, rng)
        shared = {"red_T": T, "red_d": d}
        return _extend(split, dict(shared), dict(shared), {"T": T, "d": d})

    def _measure(self, party: str, challenge, view, rng):
        T, d = view.item("red_T"), view.item("red_d")
        side = 0 if party == "A" else 1
        key = fabricate_cue_key(T, challenge["theta"], challenge["matrix"], d, side, self.lam, rng)
        consistent = T @ self.scheme.parse(key).theta == challenge["theta"]
        simulated = Challenge(party, {"key": key})
        if party == "A":
            answer = self.inner.measure_A(simulated, view, rng)
        else:
            answer = self.inner.measure_B(simulated, view, rng)
        value, notes = unwrap_answer(answer)
        return PartyAnswer(value, {**notes, f"{party}_key_consistent": consistent})

    def measure_A(self, challenge, view, rng):
        return self._measure("A", challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self._measure("B", challenge, view, rng)


# =============================================================================
# Protection contre la copie -> chiffrement inclonable
# =============================================================================

class DecisionCpReduction(Reduction):
    """
    Dernière étape de la chaîne décisionnelle : cUE-Expt

    Les messages proposés sont x̃_A, x̃_B ; le programme remis est
    P̃[f, σ] avec f tirée par la réduction, et le défi de chaque partie
    est (sk, f(x̃)).
    """

    label = "decision_cp"

    def __init__(self, inner: Adversary, in_len: int = 8, out_len: int = 8,
                 seed_len: int = 16, lam: int = 23):
        super().__init__(inner)
        self.in_len, self.out_len, self.seed_len, self.lam = in_len, out_len, seed_len, lam
        self.f: Optional[GgmKey] = None
        self.tilde: Dict[str, BitVector] = {}

    def target_config(self, trials=1000, seed=7, **overrides):
        return GameConfig(game=GameId.CUE, trials=trials, seed=seed, lam=self.lam,
                          msg_len=self.in_len, scheme="full", key_testing=True,
                          outer_key_len=self.in_len, **overrides)

    def choose_messages(self, game, lengths, rng):
        self.f = GgmKey.random(self.in_len, self.out_len, self.seed_len, rng)
        self.tilde = {key: BitVector.random(length, rng) for key, length in lengths.items()}
        return dict(self.tilde)

    def phase1(self, received, rng):
        sigma = rebuild_ciphertext(received.public, received.state, received.objects)
        program = wrap_opaque(make_tilde_patched(PlainProgram.from_ggm(self.f), sigma))
        simulated = PirateInput(
            GameId.CP_DECISION, {"in_len": self.in_len, "out_len": self.out_len, "hybrid": 3},
            None, {"program": program},
        )
        return _extend(self.inner.phase1(simulated, rng), {}, {}, {})

    def measure_A(self, challenge, view, rng):
        y = ggm_eval(self.f, self.tilde["m_A"])
        return self.inner.measure_A(Challenge("A", {"x": challenge["key"], "y": y}), view, rng)

    def measure_B(self, challenge, view, rng):
        y = ggm_eval(self.f, self.tilde["m_B"])
        return self.inner.measure_B(Challenge("B", {"x": challenge["key"], "y": y}), view, rng)


class SearchCpReduction(Reduction):
    """
    CP-Expt-Search -> UE-Expt

    Message 0^k ‖ ⟨f⟩ ; programme de recherche patché sur le chiffré.
    Au défi sk, chaque partie obtient y de l'adversaire interne et répond
    1 si Ver(f, sk, y), sinon le bit r partagé en phase 1.
    """

    label = "search_cp"

    def __init__(self, inner: Adversary, in_len: int = 8, out_len: int = 8,
                 seed_len: int = 16, prefix_len: int = 8, lam: int = 22):
        super().__init__(inner)
        self.in_len, self.out_len, self.seed_len = in_len, out_len, seed_len
        self.prefix_len, self.lam = prefix_len, lam
        self.f: Optional[GgmKey] = None

    @property
    def message_len(self) -> int:
        return self.prefix_len + KEY_HEADER_BITS + self.seed_len

    def target_config(self, trials=1000, seed=7, **overrides):
        return GameConfig(game=GameId.UE, trials=trials, seed=seed, lam=self.lam,
                          msg_len=self.message_len, scheme="full", key_testing=True,
                          outer_key_len=self.in_len, **overrides)

    def choose_messages(self, game, lengths, rng):
        self.f = GgmKey.random(self.in_len, self.out_len, self.seed_len, rng)
        return {"m": BitVector.zeros(self.prefix_len).concat(encode_ggm_key(self.f))}

    def phase1(self, received, rng):
        sigma = rebuild_ciphertext(received.public, received.state, received.objects)
        program = wrap_opaque(make_search_patched(PlainProgram.from_ggm(self.f), sigma, self.prefix_len))
        simulated = PirateInput(GameId.CP_SEARCH, {"in_len": self.in_len, "out_len": self.out_len},
                                None, {"program": program})
        split = self.inner.phase1(simulated, rng)
        r = coin(rng)
        return _extend(split, {"red_r": r}, {"red_r": r}, {"shared_r": r})

    def _measure(self, party: str, challenge, view, rng):
        simulated = Challenge(party, {"x": challenge["key"]})
        if party == "A":
            answer = self.inner.measure_A(simulated, view, rng)
        else:
            answer = self.inner.measure_B(simulated, view, rng)
        y, notes = unwrap_answer(answer)
        verified = isinstance(y, BitVector) and mac_verify(self.f, challenge["key"], y)
        value = 1 if verified else view.item("red_r")
        return PartyAnswer(value, {**notes, f"{party}_verified": verified, f"{party}_bottom": y is None})

    def measure_A(self, challenge, view, rng):
        return self._measure("A", challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self._measure("B", challenge, view, rng)


def relabel_bit(a: int, x0: BitVector, x1: BitVector) -> int:
    """ã tel que x(ã) = x^a : bit de x^a au premier indice de différence"""
    i = (x0 ^ x1).lowest_set_bit()
    return (x1 if a else x0)[i]


class PtFuncReduction(Reduction):
    """
    CP-Expt-PtFunc -> UE-Expt (variante à un bit, σ = Enc(sk; c))

    T de rang λ sur λ+1 colonnes, programme P_{T,σ} ; au défi sk la
    partie présente la paire (x⁰, x¹) = coset_pair(T, sk) et traduit la
    réponse a′ en ã avec x(ã) = x^{a′}.
    """

    label = "ptfunc"

    def __init__(self, inner: Adversary, lam: int = 4, toy_state_len: int = 2, toy_pad_rows: int = 1):
        super().__init__(inner)
        self.lam = lam
        self.toy_state_len = toy_state_len
        self.toy_pad_rows = toy_pad_rows

    def target_config(self, trials=1000, seed=7, **overrides):
        return GameConfig(game=GameId.UE, trials=trials, seed=seed, scheme="toy",
                          toy_state_len=self.toy_state_len, toy_pad_rows=self.toy_pad_rows,
                          msg_len=self.toy_pad_rows, key_testing=True, outer_key_len=self.lam,
                          ue_bit_variant=True, **overrides)

    def phase1(self, received, rng):
        sigma = rebuild_ciphertext(received.public, received.state, received.objects)
        T = sample_rank_constrained(
            self.lam, self.lam + 1, None, self.lam, rng,
            max_attempts=get_config().simulation.sampler_max_attempts,
        )
        program = wrap_opaque(make_point_coset(T, sigma))
        simulated = PirateInput(GameId.CP_PTFUNC, {"in_len": self.lam + 1}, None, {"program": program})
        split = self.inner.phase1(simulated, rng)
        return _extend(split, {"red_T": T}, {"red_T": T}, {"T": T})

    def _measure(self, party: str, challenge, view, rng):
        x0, x1 = coset_pair(view.item("red_T"), challenge["key"])
        simulated = Challenge(party, {"x0": x0, "x1": x1})
        if party == "A":
            answer = self.inner.measure_A(simulated, view, rng)
        else:
            answer = self.inner.measure_B(simulated, view, rng)
        a, notes = _inner_bit(answer, party)
        return PartyAnswer(relabel_bit(a, x0, x1), notes)

    def measure_A(self, challenge, view, rng):
        return self._measure("A", challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self._measure("B", challenge, view, rng)


# =============================================================================
# Protection « la meilleure possible »
# =============================================================================

class BestPossibleWrapper(Reduction):
    """
    Adversaire contre le substitut idéal, rejoué contre un jeu de
    protection : chaque programme reçu est réenveloppé par wrap_opaque
    """

    label = "best_possible"

    def phase1(self, received, rng):
        objects = {key: wrap_opaque(value) if isinstance(value, OpaqueProgram) else value
                   for key, value in received.objects.items()}
        return self.inner.phase1(replace(received, objects=objects), rng)

    def measure_A(self, challenge, view, rng):
        return self.inner.measure_A(challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self.inner.measure_B(challenge, view, rng)

    def coherent_measure(self, party, theta, fixed_rows, free_row, view, rng):
        return self.inner.coherent_measure(party, theta, fixed_rows, free_row, view, rng)


# =============================================================================
# Constructeurs
# =============================================================================

def search_guess(inner: Adversary, n: int = 1, lam: int = 1) -> SearchGuessReduction:
    return SearchGuessReduction(inner, n, lam)


def rand_to_search(inner: Adversary, n: int = 1, lam: int = 1) -> RandToSearchReduction:
    return RandToSearchReduction(inner, n, lam)


def cue_to_rand(inner: Adversary, lam: int = 23, msg_len: int = 8) -> CueToRandReduction:
    return CueToRandReduction(inner, lam, msg_len)


def decision_cp(inner: Adversary, preset: Optional[PresetConfig] = None) -> DecisionCpReduction:
    preset = preset or PresetConfig(name="default")
    return DecisionCpReduction(inner, preset.prf_input_len, preset.prf_output_len,
                               preset.prf_seed_len, preset.cue_lambda)


def search_cp(inner: Adversary, preset: Optional[PresetConfig] = None) -> SearchCpReduction:
    preset = preset or PresetConfig(name="default")
    return SearchCpReduction(inner, preset.prf_input_len, preset.prf_output_len,
                             preset.prf_seed_len, preset.mac_prefix_len, preset.ue_lambda)


def ptfunc(inner: Adversary, preset: Optional[PresetConfig] = None) -> PtFuncReduction:
    preset = preset or PresetConfig(name="default")
    return PtFuncReduction(inner, preset.ptfunc_lambda, preset.toy_state_len, preset.toy_pad_rows)


def best_possible_wrapper(inner: Adversary) -> BestPossibleWrapper:
    return BestPossibleWrapper(inner)
