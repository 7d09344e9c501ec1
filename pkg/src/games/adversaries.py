"""
Adversaires de référence

Stratégies de base servant d'étalon aux jeux : hasard, tout à A ou à B,
partage par moitiés, mesure de Breidbart avant partage et tabulation du
programme. Chaque partie qui détient des qubits ou un programme joue
honnêtement avec ce qu'elle possède ; une partie démunie répond au hasard.
"""

from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.constants import BUILTIN_ADVERSARIES, GameId
from ..core.errors import ParameterError, ProtocolViolation
from ..engine.f2linalg import BitVector, enumerate_vectors
from ..engine.glreduce import BREIDBART_ROTATION, inner_product_predicate, predicate_family
from ..engine.qsim import apply_unitary, measure_computational
from ..engine.unclonable import CompiledScheme
from .harness import Adversary, coin, empty_state
from .models import Challenge, PartyRegisters, PirateInput, PirateSplit
from .registers import PartyView


def random_bits(length: int, rng: np.random.Generator) -> BitVector:
    return BitVector.random(length, rng)


def guess(game: str, public: Dict[str, Any], rng: np.random.Generator) -> Any:
    """Réponse au hasard, au format attendu par le jeu"""
    if game == GameId.SEARCH:
        return random_bits(10 * public["n"] + public["lam"], rng)
    if game == GameId.CP_SEARCH:
        return random_bits(public["out_len"], rng)
    return coin(rng)


def halves(count: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Première moitié (arrondie au-dessus) à A, le reste à B"""
    middle = (count + 1) // 2
    return tuple(range(middle)), tuple(range(middle, count))


class BuiltinAdversary(Adversary):
    """
    Socle des adversaires de référence

    phase1 mémorise les parties classiques publiques et les messages
    choisis, que chaque partie retrouve dans sa copie ; _split décide des
    registres.
    """

    def __init__(self):
        self.game: Optional[str] = None
        self.public: Dict[str, Any] = {}
        self.messages: Dict[str, BitVector] = {}

    def choose_messages(self, game, lengths, rng):
        self.messages = super().choose_messages(game, lengths, rng)
        return dict(self.messages)

    def phase1(self, received: PirateInput, rng: np.random.Generator) -> PirateSplit:
        self.game = received.game
        self.public = dict(received.public)
        state = received.state if received.state is not None else empty_state()
        qubits_a, qubits_b, objects_a, objects_b = self._split(received, state.num_qubits, rng)
        return PirateSplit(
            state,
            PartyRegisters(qubits_a, objects_a),
            PartyRegisters(qubits_b, objects_b),
        )

    def _split(self, received: PirateInput, num_qubits: int, rng: np.random.Generator):
        """(qubits A, qubits B, objets A, objets B)"""
        everything = tuple(range(num_qubits))
        return everything, (), dict(received.objects), {}

    def measure_A(self, challenge, view, rng):
        return self._answer("A", challenge, view, rng)

    def measure_B(self, challenge, view, rng):
        return self._answer("B", challenge, view, rng)

    # -------------------------------------------------------------------------
    # Jeu honnête avec les ressources de la partie
    # -------------------------------------------------------------------------

    def _equipped(self, view: PartyView) -> bool:
        return bool(view.qubits) or "program" in view.items

    def _answer(self, party: str, challenge: Challenge, view: PartyView,
                rng: np.random.Generator) -> Any:
        if not self._equipped(view):
            return guess(self.game, self.public, rng)
        if self.game in (GameId.RAND, GameId.SEARCH):
            return self._answer_randomness(party, challenge, view, rng)
        if self.game in (GameId.UE, GameId.CUE):
            return self._answer_decrypt(party, challenge, view, rng)
        return self._answer_program(challenge, view, rng)

    def _estimate_x(self, theta: BitVector, view: PartyView, rng: np.random.Generator) -> BitVector:
        """Lecture des qubits possédés dans les bases θ, hasard ailleurs"""
        bits = [int(b) for b in rng.integers(2, size=theta.length)]
        owned = [q for q in range(theta.length) if q in view.qubits]
        if owned:
            outcome = view.measure_in_bases(owned, BitVector.from_bits(theta[q] for q in owned), rng)
            for k, q in enumerate(owned):
                bits[q] = outcome[k]
        return BitVector.from_bits(bits)

    def _answer_randomness(self, party, challenge, view, rng):
        x = self._estimate_x(challenge["theta"], view, rng)
        if self.game == GameId.SEARCH:
            return x
        target = self.public["r"] if party == "A" else self.public["s"]
        return int(challenge["matrix"] @ x == target)

    def _answer_decrypt(self, party, challenge, view, rng):
        scheme = self.public["scheme"]
        key = challenge["key"]
        if isinstance(scheme, CompiledScheme):
            key = self.public["A"] @ key
            scheme = scheme.base
        parsed = scheme.parse(key)
        if scheme.coupled:
            theta = scheme.basis(parsed, self.public["T"])
            pad = self.public["pad_A"] if party == "A" else self.public["pad_B"]
            expected = self.messages.get("m_A" if party == "A" else "m_B")
        else:
            theta = parsed.theta
            pad = self.public["pad"]
            expected = self.messages.get("m")
        plaintext = scheme.unpad(parsed, self._estimate_x(theta, view, rng), pad)
        if self.public.get("bit_variant"):
            return plaintext[0]
        return int(plaintext == expected)

    def _evaluate(self, x: BitVector, view: PartyView, rng: np.random.Generator):
        if "table" in view.items:
            return view.item("table")[x.value]
        return view.item("program").evaluate(x, rng)

    def _answer_program(self, challenge, view, rng):
        if self.game == GameId.CP_DECISION:
            return int(self._evaluate(challenge["x"], view, rng) == challenge["y"])
        if self.game == GameId.CP_SEARCH:
            return self._evaluate(challenge["x"], view, rng)
        # CP_PTFUNC : le point est x¹ si le programme l'accepte
        return int(self._evaluate(challenge["x1"], view, rng) == BitVector(1, 1))


class RandomGuess(BuiltinAdversary):
    """Réponses au hasard ; les qubits sont partagés par moitiés sans être lus"""

    name = "random_guess"

    def _split(self, received, num_qubits, rng):
        qubits_a, qubits_b = halves(num_qubits)
        return qubits_a, qubits_b, {}, {}

    def _answer(self, party, challenge, view, rng):
        return guess(self.game, self.public, rng)

    def coherent_measure(self, party, theta, fixed_rows, free_row, view, rng):
        if not view.qubits:
            raise ProtocolViolation("Aucun qubit pour porter la famille", party)
        table = rng.integers(2, size=1 << theta.length)
        return predicate_family(
            theta.length, view.qubits[:1],
            lambda u, k: np.broadcast_to(table[u], np.broadcast_shapes(u.shape, k.shape)),
            name="random",
        )


class GiveAllToA(BuiltinAdversary):
    """Tout l'état et tous les objets à A ; B répond au hasard"""

    name = "give_all_to_A"


class GiveAllToB(BuiltinAdversary):
    name = "give_all_to_B"

    def _split(self, received, num_qubits, rng):
        return (), tuple(range(num_qubits)), {}, dict(received.objects)


class SplitHalves(BuiltinAdversary):
    """Première moitié des qubits à A, seconde à B ; programme à A"""

    name = "split_halves"

    def _split(self, received, num_qubits, rng):
        qubits_a, qubits_b = halves(num_qubits)
        return qubits_a, qubits_b, dict(received.objects), {}


class EchoBreidbart(BuiltinAdversary):
    """
    Mesure de chaque qubit dans la base de Breidbart avant le partage

    Le résultat classique est remis aux deux parties, qui s'en servent
    comme estimation de x.
    """

    name = "echo_breidbart"

    def __init__(self):
        super().__init__()
        self.outcome: Optional[BitVector] = None

    def _split(self, received, num_qubits, rng):
        if received.state is not None and num_qubits:
            state = received.state
            for q in range(num_qubits):
                apply_unitary(state, BREIDBART_ROTATION, [q])
            self.outcome, _ = measure_computational(state, list(range(num_qubits)), rng)
        return (), (), {}, {}

    def _equipped(self, view):
        return self.outcome is not None

    def _estimate_x(self, theta, view, rng):
        return self.outcome


class HonestDecryptor(BuiltinAdversary):
    """
    Joue honnêtement avec tout ce qu'il reçoit

    Jeux de protection contre la copie : la table complète du programme est
    calculée avant le partage et remise aux deux parties. Ailleurs, tout va
    à A comme pour give_all_to_A.
    """

    name = "honest_decryptor"

    def _split(self, received, num_qubits, rng):
        program = received.objects.get("program")
        if program is None:
            return super()._split(received, num_qubits, rng)
        table = [program.evaluate(x, rng) for x in enumerate_vectors(program.in_len)]
        return (), (), {"table": table}, {"table": list(table)}

    def _equipped(self, view):
        return super()._equipped(view) or "table" in view.items


class OmniscientPredictor(BuiltinAdversary):
    """
    Adversaire truqué : connaît x par la fuite du challenger

    RAND : répond [Mx = r] ; SEARCH : répond x. Sa famille cohérente est
    le prédicat exact [u·x = r_i] de la ligne libre.
    """

    name = "omniscient"

    def __init__(self):
        super().__init__()
        self.x: Optional[BitVector] = None

    def phase1(self, received, rng):
        if not received.leaked or "x" not in received.leaked:
            raise ProtocolViolation("Adversaire omniscient sans fuite de x")
        self.x = received.leaked["x"]
        return super().phase1(received, rng)

    def _split(self, received, num_qubits, rng):
        qubits_a, qubits_b = halves(num_qubits)
        return qubits_a, qubits_b, {}, {}

    def _answer(self, party, challenge, view, rng):
        if self.game == GameId.SEARCH:
            return self.x
        if self.game == GameId.RAND:
            target = self.public["r"] if party == "A" else self.public["s"]
            return int(challenge["matrix"] @ self.x == target)
        raise ProtocolViolation(f"Adversaire omniscient hors de RAND/SEARCH ({self.game})", party)

    def coherent_measure(self, party, theta, fixed_rows, free_row, view, rng):
        if not view.qubits:
            raise ProtocolViolation("Aucun qubit pour porter la famille", party)
        target = self.public["r"] if party == "A" else self.public["s"]
        flip = 1 ^ target[free_row]
        exact = inner_product_predicate(self.x)
        return predicate_family(
            self.x.length, view.qubits[:1],
            lambda u, k: exact(u, k) ^ flip,
            name="omniscient",
        )


_BUILTINS = {
    "random_guess": RandomGuess,
    "give_all_to_A": GiveAllToA,
    "give_all_to_B": GiveAllToB,
    "split_halves": SplitHalves,
    "echo_breidbart": EchoBreidbart,
    "honest_decryptor": HonestDecryptor,
}


def builtin_adversary(name: str) -> Adversary:
    """Instancie un adversaire de référence par son nom"""
    if name not in _BUILTINS:
        raise ParameterError(
            f"Adversaire inconnu: {name} (disponibles: {', '.join(BUILTIN_ADVERSARIES)})"
        )
    return _BUILTINS[name]()
