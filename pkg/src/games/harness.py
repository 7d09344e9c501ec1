"""
Harnais des expériences de sécurité

Chaque essai suit le script du challenger de son jeu : tirages dans l'ordre
de l'expérience, phase 1 de l'adversaire (partage de l'état entre A et B),
puis mesures de A et de B sur des copies indépendantes de l'adversaire.
Les essais sont indépendants ; leurs enregistrements sont agrégés dans
l'ordre des indices.
"""

import copy
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.config import get_config, resolve_workers
from ..core.constants import GameId
from ..core.errors import DimensionError, ProtocolViolation
from ..core.logger import get_logger
from ..engine.crypto import GgmKey, ggm_eval, ggm_puncture, mac_verify
from ..engine.f2linalg import BitVector, enumerate_vectors
from ..engine.glreduce import MeasurementFamily
from ..engine.programs import (
    PlainProgram, ProgramDescriptor, make_patched, make_point, make_tilde_patched
)
from ..engine.qsim import StateVector
from ..engine.qsio import OpaqueProgram, assert_functional_equiv, wrap_opaque
from ..engine.unclonable import (
    CompiledCiphertext, CompiledScheme, CueCiphertext, UeCiphertext, unclonable_randomness_sample
)
from .models import (
    Challenge, GameConfig, GameResult, PirateInput, PirateSplit, TrialRecord, unwrap_answer
)
from .registers import PartyView, check_no_stash, check_split

SOURCE = "harness"

# Générateurs par essai : challenger, adversaire (phase 1), A, B, audits
STREAMS = 5


class Adversary(ABC):
    """
    Adversaire pirate à deux phases

    phase1 reçoit le chiffré ou le programme et produit le partage A/B ;
    measure_A et measure_B reçoivent la clé ou le défi de leur partie et
    n'agissent que sur leurs registres. Chaque mesure s'exécute sur une
    copie de l'adversaire prise après la phase 1.
    """

    name = "adversary"

    def choose_messages(self, game: str, lengths: Dict[str, int],
                        rng: np.random.Generator) -> Dict[str, BitVector]:
        """Messages proposés au challenger (UE, cUE) ; zéros par défaut"""
        return {key: BitVector.zeros(length) for key, length in lengths.items()}

    @abstractmethod
    def phase1(self, received: PirateInput, rng: np.random.Generator) -> PirateSplit:
        pass

    @abstractmethod
    def measure_A(self, challenge: Challenge, view: PartyView, rng: np.random.Generator) -> Any:
        pass

    @abstractmethod
    def measure_B(self, challenge: Challenge, view: PartyView, rng: np.random.Generator) -> Any:
        pass

    def coherent_measure(self, party: str, theta: BitVector, fixed_rows: Dict[int, BitVector],
                         free_row: int, view: PartyView,
                         rng: np.random.Generator) -> MeasurementFamily:
        """
        Mesure de Rand-Expt en famille indexée par la ligne libre

        Retourne {A^{θ,M(u)}}_u où M reprend fixed_rows et porte u à
        l'indice free_row ; utilisée par l'extraction GL.
        """
        raise ProtocolViolation(f"{self.name} n'expose pas de famille de mesures", party)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


# =============================================================================
# Outils partagés avec les adversaires et les réductions
# =============================================================================

def empty_state() -> StateVector:
    """État à zéro qubit des jeux sans chiffré quantique"""
    return StateVector(0, np.ones(1, dtype=np.complex128))


def trial_generators(seed: int, index: int) -> List[np.random.Generator]:
    """Générateurs indépendants de l'essai index sous la graine maîtresse"""
    root = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return [np.random.default_rng(child) for child in root.spawn(STREAMS)]


def coin(rng: np.random.Generator) -> int:
    return int(rng.integers(2))


def ciphertext_parts(ct, scheme) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Parties classiques publiques et objets quantiques d'un chiffré"""
    if isinstance(ct, CompiledCiphertext):
        public, _ = ciphertext_parts(ct.inner, scheme.base)
        public.update({"scheme": scheme, "A": ct.A})
        return public, {"indicators": ct.indicators}
    if isinstance(ct, UeCiphertext):
        return {"scheme": scheme, "pad": ct.pad, "params": ct.params}, {}
    if isinstance(ct, CueCiphertext):
        return {"scheme": scheme, "T": ct.T, "pad_A": ct.pad_A, "pad_B": ct.pad_B,
                "params": ct.params}, {}
    raise TypeError(f"Type de chiffré inconnu: {type(ct).__name__}")


def rebuild_ciphertext(public: Dict[str, Any], state: StateVector,
                       objects: Dict[str, Any]):
    """Chiffré reconstitué à partir de ce que reçoit l'adversaire"""
    scheme = public["scheme"]
    base = scheme.base if isinstance(scheme, CompiledScheme) else scheme
    if base.coupled:
        inner = CueCiphertext(state, public["T"], public["pad_A"], public["pad_B"], public["params"])
    else:
        inner = UeCiphertext(state, public["pad"], public["params"])
    if isinstance(scheme, CompiledScheme):
        return CompiledCiphertext(public["A"], inner, tuple(objects["indicators"]), scheme)
    return inner


def decision_program(hybrid: int, f: GgmKey, x_a: BitVector, x_b: BitVector,
                     tilde: Optional[Tuple[BitVector, BitVector]],
                     scheme: Optional[CompiledScheme],
                     rng: np.random.Generator) -> ProgramDescriptor:
    """
    Programme remis dans l'hybride donné de CP-Expt-Decision

    0 : f ; 1 : P[f ponctuée, Enc(x_A, x_B; f(x_A), f(x_B))] ;
    2 : P[f ponctuée, Enc(x_A, x_B; f(x̃_A), f(x̃_B))] ;
    3 : P̃[f, Enc(x_A, x_B; x̃_A, x̃_B)].
    """
    if hybrid == 0:
        return PlainProgram.from_ggm(f)
    if scheme is None:
        raise DimensionError(f"Hybride {hybrid} sans schéma cUE compilé")
    if hybrid == 1:
        ct = scheme.encrypt_pair(x_a, x_b, ggm_eval(f, x_a), ggm_eval(f, x_b), rng)
        return make_patched(PlainProgram.from_punctured(ggm_puncture(f, {x_a, x_b})), ct)
    if tilde is None:
        raise DimensionError(f"Hybride {hybrid} sans points x̃")
    if hybrid == 2:
        ct = scheme.encrypt_pair(x_a, x_b, ggm_eval(f, tilde[0]), ggm_eval(f, tilde[1]), rng)
        return make_patched(PlainProgram.from_punctured(ggm_puncture(f, {x_a, x_b})), ct)
    ct = scheme.encrypt_pair(x_a, x_b, tilde[0], tilde[1], rng)
    return make_tilde_patched(PlainProgram.from_ggm(f), ct)


# =============================================================================
# Déroulé d'un essai
# =============================================================================

@dataclass
class _Trial:
    challenger: np.random.Generator
    adversary: np.random.Generator
    rng_a: np.random.Generator
    rng_b: np.random.Generator
    audit: np.random.Generator
    record: TrialRecord


def _leak(config: GameConfig, **values) -> Optional[Dict[str, Any]]:
    return dict(values) if config.leak_secret else None


def _as_bit(value: Any, party: str) -> int:
    if isinstance(value, (bool, int, np.integer)) and int(value) in (0, 1):
        return int(value)
    raise ProtocolViolation(f"Réponse {value!r} : un bit est attendu", party)


def _as_string(value: Any, length: int, party: str, allow_none: bool = False) -> Optional[BitVector]:
    if value is None and allow_none:
        return None
    if isinstance(value, BitVector) and value.length == length:
        return value
    raise ProtocolViolation(f"Réponse {value!r} : chaîne de {length} bits attendue", party)


def _message(messages: Any, key: str, length: int) -> BitVector:
    value = messages.get(key) if isinstance(messages, dict) else None
    if not isinstance(value, BitVector) or value.length != length:
        raise ProtocolViolation(f"Message {key} : {length} bits attendus, reçu {value!r}")
    return value


def _play(t: _Trial, adv: Adversary, received: PirateInput,
          challenges: Callable[[], Tuple[Challenge, Challenge]]) -> Tuple[Any, Any]:
    """Phase 1, contrôle du partage, puis mesures sans canal entre A et B"""
    split = adv.phase1(received, t.adversary)
    check_split(split)
    check_no_stash(adv)
    t.record.notes.update(split.note)

    challenge_a, challenge_b = challenges()
    snapshot_a, snapshot_b = copy.deepcopy(adv), copy.deepcopy(adv)
    answer_a = snapshot_a.measure_A(challenge_a, PartyView("A", split.state, split.a), t.rng_a)
    answer_b = snapshot_b.measure_B(challenge_b, PartyView("B", split.state, split.b), t.rng_b)

    value_a, note_a = unwrap_answer(answer_a)
    value_b, note_b = unwrap_answer(answer_b)
    t.record.notes.update(note_a)
    t.record.notes.update(note_b)
    return value_a, value_b


def _score(t: _Trial, answer_a: Any, answer_b: Any, a_correct: bool, b_correct: bool):
    record = t.record
    record.answers = {"A": answer_a, "B": answer_b}
    record.a_correct = bool(a_correct)
    record.b_correct = bool(b_correct)
    record.win = record.a_correct and record.b_correct


def _score_bits(t: _Trial, value_a: Any, value_b: Any, expected_a: int, expected_b: int):
    bit_a, bit_b = _as_bit(value_a, "A"), _as_bit(value_b, "B")
    _score(t, bit_a, bit_b, bit_a == expected_a, bit_b == expected_b)


def _fixed(*challenges: Challenge) -> Callable[[], Tuple[Challenge, Challenge]]:
    return lambda: challenges


# =============================================================================
# Scripts des challengers
# =============================================================================

def _rand_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    sample = unclonable_randomness_sample(config.n, config.lam, ch)
    r0 = BitVector.random(config.n, ch)
    s0 = BitVector.random(config.n, ch)
    a, b = coin(ch), coin(ch)

    t.record.secrets = {"x": sample.x, "theta": sample.theta, "a": a, "b": b}
    public = {"n": config.n, "lam": config.lam,
              "r": sample.r1 if a else r0, "s": sample.s1 if b else s0}
    received = PirateInput(GameId.RAND, public, sample.state,
                           leaked=_leak(config, x=sample.x, theta=sample.theta))
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"theta": sample.theta, "matrix": sample.U}),
        Challenge("B", {"theta": sample.theta, "matrix": sample.V}),
    ))
    _score_bits(t, value_a, value_b, a, b)


def _search_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    sample = unclonable_randomness_sample(config.n, config.lam, ch)

    t.record.secrets = {"x": sample.x, "theta": sample.theta}
    public = {"n": config.n, "lam": config.lam, "r": sample.r1, "s": sample.s1}
    received = PirateInput(GameId.SEARCH, public, sample.state,
                           leaked=_leak(config, x=sample.x, theta=sample.theta))
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"theta": sample.theta, "matrix": sample.U}),
        Challenge("B", {"theta": sample.theta, "matrix": sample.V}),
    ))
    guess_a = _as_string(value_a, config.length, "A")
    guess_b = _as_string(value_b, config.length, "B")
    _score(t, guess_a, guess_b, guess_a == sample.x, guess_b == sample.x)


def _encrypt(fn: Callable[[], Any]):
    # Messages de l'adversaire incompatibles avec le schéma
    try:
        return fn()
    except DimensionError as e:
        raise ProtocolViolation(str(e)) from e


def _ue_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    sk = scheme.keygen(ch)
    if config.ue_bit_variant:
        c = coin(ch)
        plaintext = BitVector(1, c)
    else:
        messages = adv.choose_messages(GameId.UE, {"m": config.msg_len}, t.adversary)
        m = _message(messages, "m", config.msg_len)
        m0 = BitVector.random(config.msg_len, ch)
        c = coin(ch)
        plaintext = m if c else m0
    ct = _encrypt(lambda: scheme.encrypt(sk, plaintext, ch))

    t.record.secrets = {"sk": sk, "c": c}
    public, objects = ciphertext_parts(ct, scheme)
    public["bit_variant"] = config.ue_bit_variant
    received = PirateInput(GameId.UE, public, ct.state, objects, _leak(config, sk=sk, c=c))
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"key": sk}), Challenge("B", {"key": sk}),
    ))
    _score_bits(t, value_a, value_b, c, c)


def _cue_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    sk_a, sk_b = scheme.keygen(ch), scheme.keygen(ch)
    lengths = {"m_A": config.msg_len, "m_B": config.msg_len}
    messages = adv.choose_messages(GameId.CUE, lengths, t.adversary)
    m_a = _message(messages, "m_A", config.msg_len)
    m_b = _message(messages, "m_B", config.msg_len)
    m0_a = BitVector.random(config.msg_len, ch)
    m0_b = BitVector.random(config.msg_len, ch)
    a, b = coin(ch), coin(ch)
    ct = _encrypt(lambda: scheme.encrypt_pair(
        sk_a, sk_b, m_a if a else m0_a, m_b if b else m0_b, ch
    ))

    t.record.secrets = {"sk_A": sk_a, "sk_B": sk_b, "a": a, "b": b}
    public, objects = ciphertext_parts(ct, scheme)
    received = PirateInput(GameId.CUE, public, ct.state, objects,
                           _leak(config, sk_A=sk_a, sk_B=sk_b, a=a, b=b))
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"key": sk_a}), Challenge("B", {"key": sk_b}),
    ))
    _score_bits(t, value_a, value_b, a, b)


def _audit_decision(config: GameConfig, program: ProgramDescriptor, f: GgmKey,
                    x_a: BitVector, x_b: BitVector, tilde, scheme, t: _Trial):
    """H1 ≡ f et H3 ≡ son pendant H2, sur tout le domaine"""
    domain = list(enumerate_vectors(config.prf_input_len))
    if config.hybrid == 1:
        assert_functional_equiv(program, PlainProgram.from_ggm(f), domain, t.audit)
        t.record.notes["audit"] = "h1=f"
    elif config.hybrid == 3:
        counterpart = decision_program(2, f, x_a, x_b, tilde, scheme, t.audit)
        assert_functional_equiv(program, counterpart, domain, t.audit)
        t.record.notes["audit"] = "h3=h2"


def _cp_decision_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    f = GgmKey.random(config.prf_input_len, config.prf_output_len, config.prf_seed_len, ch)
    x_a, x_b, xp_a, xp_b = (BitVector.random(config.prf_input_len, ch) for _ in range(4))
    tilde = None
    if config.hybrid >= 2:
        tilde = (BitVector.random(config.prf_input_len, ch), BitVector.random(config.prf_input_len, ch))
    program = decision_program(config.hybrid, f, x_a, x_b, tilde, scheme, ch)
    if config.audit_equivalence:
        _audit_decision(config, program, f, x_a, x_b, tilde, scheme, t)

    y0 = (ggm_eval(f, xp_a), ggm_eval(f, xp_b))
    y1 = (ggm_eval(f, tilde[0]), ggm_eval(f, tilde[1])) if tilde else (ggm_eval(f, x_a), ggm_eval(f, x_b))
    a, b = coin(ch), coin(ch)

    t.record.secrets = {"x_A": x_a, "x_B": x_b, "a": a, "b": b, "hybrid": config.hybrid}
    received = PirateInput(
        GameId.CP_DECISION,
        {"in_len": config.prf_input_len, "out_len": config.prf_output_len, "hybrid": config.hybrid},
        None, {"program": wrap_opaque(program)}, _leak(config, a=a, b=b),
    )
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"x": x_a, "y": y1[0] if a else y0[0]}),
        Challenge("B", {"x": x_b, "y": y1[1] if b else y0[1]}),
    ))
    _score_bits(t, value_a, value_b, a, b)


def _cp_search_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    f = GgmKey.random(config.prf_input_len, config.prf_output_len, config.prf_seed_len, ch)
    received = PirateInput(
        GameId.CP_SEARCH,
        {"in_len": config.prf_input_len, "out_len": config.prf_output_len},
        None, {"program": wrap_opaque(PlainProgram.from_ggm(f))},
    )
    chosen: Dict[str, BitVector] = {}

    def challenges():
        # x n'est tiré qu'après le partage
        chosen["x"] = BitVector.random(config.prf_input_len, ch)
        return Challenge("A", {"x": chosen["x"]}), Challenge("B", {"x": chosen["x"]})

    value_a, value_b = _play(t, adv, received, challenges)
    x = chosen["x"]
    t.record.secrets = {"x": x}
    y_a = _as_string(value_a, config.prf_output_len, "A", allow_none=True)
    y_b = _as_string(value_b, config.prf_output_len, "B", allow_none=True)
    _score(t, y_a, y_b, mac_verify(f, x, y_a), mac_verify(f, x, y_b))


def _cp_ptfunc_trial(config: GameConfig, scheme, adv: Adversary, t: _Trial):
    ch = t.challenger
    length = config.ptfunc_lambda + 1
    x0, x1 = BitVector.random(length, ch), BitVector.random(length, ch)
    c = coin(ch)
    program = wrap_opaque(make_point({x1 if c else x0}, length))

    t.record.secrets = {"x0": x0, "x1": x1, "c": c}
    received = PirateInput(GameId.CP_PTFUNC, {"in_len": length}, None, {"program": program},
                           _leak(config, c=c))
    value_a, value_b = _play(t, adv, received, _fixed(
        Challenge("A", {"x0": x0, "x1": x1}), Challenge("B", {"x0": x0, "x1": x1}),
    ))
    _score_bits(t, value_a, value_b, c, c)


_SCRIPTS = {
    GameId.RAND: _rand_trial,
    GameId.SEARCH: _search_trial,
    GameId.UE: _ue_trial,
    GameId.CUE: _cue_trial,
    GameId.CP_DECISION: _cp_decision_trial,
    GameId.CP_SEARCH: _cp_search_trial,
    GameId.CP_PTFUNC: _cp_ptfunc_trial,
}


def _game_scheme(config: GameConfig):
    if config.game in (GameId.UE, GameId.CUE):
        return config.build_scheme()
    if config.game == GameId.CP_DECISION and config.hybrid >= 1:
        return config.decision_scheme()
    return None


def run_trial(config: GameConfig, adv: Adversary, index: int, scheme=None) -> TrialRecord:
    """
    Un essai du jeu ; les violations de protocole sont consignées

    EquivalenceFailure n'est pas interceptée : un audit en échec
    interrompt l'expérience.
    """
    if scheme is None:
        scheme = _game_scheme(config)
    challenger, adversary, rng_a, rng_b, audit = trial_generators(config.seed, index)
    record = TrialRecord(index)
    trial = _Trial(challenger, adversary, rng_a, rng_b, audit, record)
    try:
        _SCRIPTS[config.game](config, scheme, copy.deepcopy(adv), trial)
    except ProtocolViolation as e:
        record.violation = str(e)
        record.win = record.a_correct = record.b_correct = False
    return record


def run_game(config: GameConfig, adv: Adversary) -> GameResult:
    """
    Exécute config.trials essais et agrège les résultats

    Returns:
        GameResult avec taux, intervalle de Wilson et décomptes par branche
    """
    config.validate()
    logger = get_logger()
    name = getattr(adv, "name", type(adv).__name__)
    performance = get_config().performance
    workers = resolve_workers(config.workers, performance.workers)
    scheme = _game_scheme(config)

    logger.info(
        f"Jeu {config.game} contre {name}: {config.trials} essais, graine {config.seed}, "
        f"{workers} worker(s)", SOURCE
    )
    start = time.perf_counter()

    def job(index: int) -> TrialRecord:
        return run_trial(config, adv, index, scheme)

    if workers > 1 and performance.use_threading and config.trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(job, range(config.trials)))
    else:
        records = [job(i) for i in range(config.trials)]

    result = GameResult(game=config.game, adversary=name, wins=0, trials=config.trials)
    for record in records:
        if record.violation:
            result.violations += 1
            continue
        result.wins += record.win
        result.a_correct += record.a_correct
        result.b_correct += record.b_correct
        result.a_only += record.a_correct and not record.b_correct
        result.b_only += record.b_correct and not record.a_correct
    result.elapsed = time.perf_counter() - start
    if config.keep_records:
        result.records = records

    if result.violations:
        logger.warning(f"{result.violations} essai(s) en violation de protocole", SOURCE)
    low, high = result.interval
    logger.success(
        f"Jeu {config.game}: {result.wins}/{result.trials} = {result.win_rate:.4f} "
        f"[{low:.4f}, {high:.4f}] en {result.elapsed:.2f}s", SOURCE
    )
    return result
