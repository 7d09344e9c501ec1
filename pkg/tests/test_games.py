"""
Tests des jeux de sécurité : harnais, registres et adversaires de référence
"""

import math
import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.constants import BUILTIN_ADVERSARIES, GameId
from src.core.errors import ParameterError, ProtocolViolation
from src.engine.f2linalg import BitVector
from src.engine.qsim import StateVector, X_GATE
from src.games.adversaries import OmniscientPredictor, builtin_adversary, halves
from src.games.harness import Adversary, empty_state, run_game, run_trial, trial_generators
from src.games.models import (
    GameConfig, GameResult, PartyAnswer, PartyRegisters, PirateSplit, TrialRecord
)
from src.games.registers import PartyView, check_split, quantum_resource_ids
from src.utils.stats_utils import StatsUtils


def near(rate: float, expected: float, trials: int, k: float = 5.0) -> bool:
    return abs(rate - expected) <= k * math.sqrt(expected * (1 - expected) / trials) + 1e-9


def play(game, preset, adversary, trials, **overrides):
    config = GameConfig.from_preset(game, preset, trials=trials, **overrides)
    return run_game(config, builtin_adversary(adversary) if isinstance(adversary, str) else adversary)


class _Scripted(Adversary):
    """Adversaire paramétrable pour les violations de protocole"""

    name = "scripted"

    def __init__(self, split=None, answer=0):
        self.split = split
        self.answer = answer

    def phase1(self, received, rng):
        state = received.state if received.state is not None else StateVector(0, np.ones(1))
        if self.split is not None:
            return self.split(state, received)
        return PirateSplit(state, PartyRegisters(), PartyRegisters())

    def measure_A(self, challenge, view, rng):
        return self.answer

    def measure_B(self, challenge, view, rng):
        return self.answer


class _Stasher(_Scripted):
    def phase1(self, received, rng):
        self.kept = received.state
        return super().phase1(received, rng)


class _Signaller(Adversary):
    """
    Le secret n'est remis qu'au registre de A

    A tente de le transmettre à B par l'objet adversaire ; B le répète s'il
    le trouve, sinon répond au hasard.
    """

    name = "signaller"

    def phase1(self, received, rng):
        return PirateSplit(empty_state(), PartyRegisters((), {"c": received.leaked["c"]}),
                           PartyRegisters())

    def measure_A(self, challenge, view, rng):
        self.signal = view.item("c")
        return self.signal

    def measure_B(self, challenge, view, rng):
        return getattr(self, "signal", view.items.get("c", int(rng.integers(2))))


class TestGameConfig:
    """Configuration des jeux depuis les presets"""

    def test_from_preset(self, toy_preset):
        config = GameConfig.from_preset(GameId.RAND, toy_preset, trials=10)
        assert (config.n, config.lam, config.length) == (1, 1, 11)
        assert GameConfig.from_preset(GameId.CUE, toy_preset).lam == 23
        assert GameConfig.from_preset(GameId.CP_SEARCH, toy_preset).lam == 22

    def test_validate_rejects(self, toy_preset):
        with pytest.raises(ParameterError):
            GameConfig(game="inconnu").validate()
        with pytest.raises(ParameterError):
            GameConfig.from_preset(GameId.UE, toy_preset, trials=0).validate()
        with pytest.raises(ParameterError):
            GameConfig.from_preset(GameId.UE, toy_preset, msg_len=3).validate()
        with pytest.raises(ParameterError):
            GameConfig(game=GameId.SEARCH, n=0, lam=0).validate()
        with pytest.raises(ParameterError):
            GameConfig(game=GameId.UE, lam=21).validate()

    def test_seed_range(self):
        with pytest.raises(ParameterError):
            GameConfig(game=GameId.SEARCH, seed=1 << 64).validate()


class TestTrialStreams:
    def test_streams_are_reproducible(self):
        first = [g.integers(1 << 30) for g in trial_generators(7, 3)]
        second = [g.integers(1 << 30) for g in trial_generators(7, 3)]
        assert first == second

    def test_streams_differ_between_trials(self):
        assert (trial_generators(7, 0)[0].integers(1 << 30)
                != trial_generators(7, 1)[0].integers(1 << 30))


class TestRegisters:
    """Contrôle du partage et vues des parties"""

    def test_overlap_rejected(self):
        split = PirateSplit(StateVector.zero(2), PartyRegisters((0,)), PartyRegisters((0, 1)))
        with pytest.raises(ProtocolViolation):
            check_split(split)

    def test_out_of_range_qubit(self):
        split = PirateSplit(StateVector.zero(2), PartyRegisters((2,)), PartyRegisters())
        with pytest.raises(ProtocolViolation):
            check_split(split)

    def test_shared_quantum_resource(self):
        extra = StateVector.zero(1)
        split = PirateSplit(StateVector.zero(1), PartyRegisters((), {"s": extra}),
                            PartyRegisters((), {"t": [extra]}))
        with pytest.raises(ProtocolViolation):
            check_split(split)

    def test_resource_ids_recursive(self):
        state = StateVector.zero(1)
        assert quantum_resource_ids({"a": [(state,)]}) == {id(state)}

    def test_view_owns_its_qubits(self, rng):
        state = StateVector.zero(2)
        view = PartyView("A", state, PartyRegisters((0,)))
        view.apply(X_GATE, [0])
        assert view.measure([0], rng).value == 1
        with pytest.raises(ProtocolViolation):
            view.apply(X_GATE, [1])
        with pytest.raises(ProtocolViolation):
            view.item("absent")

    def test_halves(self):
        assert halves(5) == ((0, 1, 2), (3, 4))
        assert halves(0) == ((), ())


class TestProtocolViolations:
    """Les violations sont consignées et comptent comme des défaites"""

    def test_overlapping_split(self, toy_preset):
        def overlapping(state, received):
            return PirateSplit(state, PartyRegisters((0,)), PartyRegisters((0,)))

        result = play(GameId.SEARCH, toy_preset, _Scripted(overlapping), 3)
        assert result.violations == 3
        assert result.wins == 0

    def test_invalid_answer(self, toy_preset):
        result = play(GameId.UE, toy_preset, _Scripted(answer="oui"), 3)
        assert result.violations == 3

    def test_stashed_state(self, toy_preset):
        result = play(GameId.RAND, toy_preset, _Stasher(), 2)
        assert result.violations == 2

    def test_violation_recorded(self, toy_preset):
        config = GameConfig.from_preset(GameId.UE, toy_preset, trials=1)
        record = run_trial(config, _Scripted(answer=2), 0)
        assert record.violation
        assert not record.win


class TestBuiltinAdversaries:
    """Taux de référence des adversaires prédéfinis"""

    def test_registry(self):
        for name in BUILTIN_ADVERSARIES:
            assert builtin_adversary(name).name == name
        with pytest.raises(ParameterError):
            builtin_adversary("inconnu")

    @pytest.mark.parametrize("game", [GameId.RAND, GameId.UE, GameId.CUE, GameId.CP_PTFUNC])
    def test_random_guess_two_bit_games(self, game, toy_preset):
        result = play(game, toy_preset, "random_guess", 300)
        assert result.violations == 0
        assert near(result.win_rate, 0.25, 300)

    def test_random_guess_search(self, toy_preset):
        """Chaque partie devine les 10n+λ bits de x"""
        trials = 400
        result = play(GameId.SEARCH, toy_preset, "random_guess", trials)
        single = 2.0 ** -(10 * toy_preset.search_n + toy_preset.search_lambda)
        assert result.violations == 0
        assert near(result.rate(result.a_correct), single, trials)
        assert near(result.rate(result.b_correct), single, trials)
        assert near(result.win_rate, single ** 2, trials)

    def test_random_guess_search_cp(self, toy_preset):
        """Une étiquette au hasard vérifie avec probabilité 2^-out_len"""
        trials = 400
        result = play(GameId.CP_SEARCH, toy_preset, "random_guess", trials)
        single = 2.0 ** -toy_preset.prf_output_len
        assert result.violations == 0
        assert near(result.rate(result.a_correct), single, trials)
        assert near(result.win_rate, single ** 2, trials)

    def test_echo_breidbart_search(self, toy_preset):
        result = play(GameId.SEARCH, toy_preset, "echo_breidbart", 400, n=0, lam=1)
        assert near(result.win_rate, (2 + math.sqrt(2)) / 4, 400)

    def test_give_all_to_a_cue(self, toy_preset):
        trials = 300
        result = play(GameId.CUE, toy_preset, "give_all_to_A", trials)
        expected_a = 1 - 2 ** -(toy_preset.msg_len + 1)
        assert near(result.rate(result.a_correct), expected_a, trials)
        assert near(result.win_rate, expected_a / 2, trials)

    def test_give_all_to_a_rand(self, toy_preset):
        result = play(GameId.RAND, toy_preset, "give_all_to_A", 300)
        assert near(result.rate(result.a_correct), 0.75, 300)

    def test_split_halves_search(self, toy_preset):
        """Chaque partie lit sa moitié de x ; les bits manquants sont devinés"""
        result = play(GameId.SEARCH, toy_preset, "split_halves", 300, n=0, lam=2)
        assert near(result.rate(result.a_correct), 0.5, 300)
        assert near(result.rate(result.b_correct), 0.5, 300)

    def test_honest_decryptor_search_cp(self, toy_preset):
        result = play(GameId.CP_SEARCH, toy_preset, "honest_decryptor", 10)
        assert result.win_rate == 1.0

    def test_honest_decryptor_ptfunc(self, toy_preset):
        result = play(GameId.CP_PTFUNC, toy_preset, "honest_decryptor", 100)
        assert result.win_rate >= 0.9

    def test_omniscient_search(self, toy_preset):
        result = play(GameId.SEARCH, toy_preset, OmniscientPredictor(), 20, leak_secret=True)
        assert result.win_rate == 1.0

    def test_omniscient_rand(self, toy_preset):
        """r⁰ tiré au hasard peut coïncider avec Ux : A se trompe alors"""
        result = play(GameId.RAND, toy_preset, OmniscientPredictor(), 300, leak_secret=True)
        assert near(result.rate(result.a_correct), 0.75, 300)
        assert near(result.win_rate, 0.5625, 300)

    def test_omniscient_without_leak(self, toy_preset):
        result = play(GameId.SEARCH, toy_preset, OmniscientPredictor(), 2)
        assert result.violations == 2


class TestDecisionGame:
    """CP-Expt-Decision et ses hybrides"""

    def test_hybrid_zero_random_guess(self, toy_preset):
        result = play(GameId.CP_DECISION, toy_preset, "random_guess", 200)
        assert near(result.win_rate, 0.25, 200)

    def test_honest_in_audited_hybrid_one(self, toy_preset):
        """
        H1 calcule f : une partie ne se trompe que si b = 0 et f(x′) = f(x),
        soit q = 2^-in + (1 − 2^-in)·2^-out
        """
        trials = 40
        result = play(GameId.CP_DECISION, toy_preset, "honest_decryptor", trials,
                      hybrid=1, audit_equivalence=True, keep_records=True)
        collision = (2.0 ** -toy_preset.prf_input_len
                     + (1 - 2.0 ** -toy_preset.prf_input_len) * 2.0 ** -toy_preset.prf_output_len)
        single = 1 - collision / 2
        assert result.violations == 0
        assert near(result.rate(result.a_correct), single, trials)
        assert near(result.win_rate, single ** 2, trials)
        assert all(r.notes.get("audit") == "h1=f" for r in result.records)

    def test_audited_hybrid_three(self, toy_preset):
        result = play(GameId.CP_DECISION, toy_preset, "random_guess", 3,
                      hybrid=3, audit_equivalence=True, keep_records=True)
        assert [r.notes["audit"] for r in result.records] == ["h3=h2"] * 3


class TestRunGame:
    """Agrégation et reproductibilité"""

    def test_reproducible(self, toy_preset):
        first = play(GameId.UE, toy_preset, "give_all_to_A", 50)
        second = play(GameId.UE, toy_preset, "give_all_to_A", 50)
        assert first.wins == second.wins

    def test_workers_do_not_change_results(self, toy_preset):
        sequential = play(GameId.CUE, toy_preset, "split_halves", 40, workers=1, keep_records=True)
        parallel = play(GameId.CUE, toy_preset, "split_halves", 40, workers=4, keep_records=True)
        assert [r.win for r in sequential.records] == [r.win for r in parallel.records]

    def test_records_dataframe(self, toy_preset):
        result = play(GameId.UE, toy_preset, "random_guess", 5, keep_records=True)
        frame = result.to_dataframe()
        assert list(frame["trial"]) == list(range(5))
        assert {"win", "a_correct", "b_correct", "violation", "secret_c"} <= set(frame.columns)

    def test_records_dropped_by_default(self, toy_preset):
        result = play(GameId.UE, toy_preset, "random_guess", 5)
        assert result.records == []
        assert result.to_dataframe().empty

    def test_result_dict(self):
        result = GameResult(game=GameId.UE, adversary="x", wins=5, trials=20, a_correct=7)
        data = result.to_dict()
        assert data["win_rate"] == 0.25
        assert data["tallies"]["a_correct"] == 7
        low, high = data["interval"]
        assert low < 0.25 < high

    def test_party_answer_notes(self, toy_preset):
        class Annotating(_Scripted):
            def measure_A(self, challenge, view, rng):
                return PartyAnswer(0, {"vu": True})

        config = GameConfig.from_preset(GameId.UE, toy_preset, trials=1)
        record = run_trial(config, Annotating(), 0)
        assert record.notes["vu"] is True

    def test_trial_record_row(self):
        record = TrialRecord(0, win=True, secrets={"x": BitVector.from_string("10")})
        assert record.to_row()["secret_x"] == "10"


class TestNonCommunication:
    """Aucun canal entre A et B pendant les mesures"""

    TRIALS = 10_000

    def test_b_blind_to_a_register(self, toy_preset):
        config = GameConfig.from_preset(GameId.CP_PTFUNC, toy_preset, trials=self.TRIALS,
                                        leak_secret=True, keep_records=True)
        result = run_game(config, _Signaller())
        assert result.violations == 0
        assert result.a_correct == self.TRIALS

        counts = {0: [0, 0], 1: [0, 0]}
        for record in result.records:
            counts[record.secrets["c"]][record.answers["B"]] += 1
        same, pvalue = StatsUtils.chi_square_same_distribution(counts[0], counts[1])
        assert same, f"B dépend du secret de A (p = {pvalue:.2e})"

        answers = [record.answers["B"] for record in result.records]
        uniform, _ = StatsUtils.chi_square_uniform([answers.count(0), answers.count(1)])
        balanced, _ = StatsUtils.monobit_test(answers)
        assert uniform and balanced
        assert near(result.rate(result.b_correct), 0.5, self.TRIALS)


class TestTranscripts:
    """Transcriptions figées par la graine"""

    ADVERSARIES = {
        GameId.RAND: "random_guess",
        GameId.SEARCH: "split_halves",
        GameId.UE: "give_all_to_A",
        GameId.CUE: "split_halves",
        GameId.CP_DECISION: "random_guess",
        GameId.CP_SEARCH: "random_guess",
        GameId.CP_PTFUNC: "honest_decryptor",
    }

    @pytest.mark.parametrize("game", list(ADVERSARIES))
    def test_transcript_fixed_by_seed(self, game, toy_preset):
        adversary = self.ADVERSARIES[game]
        first = play(game, toy_preset, adversary, 12, seed=2024, workers=1, keep_records=True)
        second = play(game, toy_preset, adversary, 12, seed=2024, workers=3, keep_records=True)
        assert first.to_dict() == second.to_dict()
        assert first.to_dataframe().equals(second.to_dataframe())

    def test_other_seed_changes_secrets(self, toy_preset):
        first = play(GameId.SEARCH, toy_preset, "random_guess", 12, seed=1, keep_records=True)
        second = play(GameId.SEARCH, toy_preset, "random_guess", 12, seed=2, keep_records=True)
        assert ([r.secrets["x"] for r in first.records]
                != [r.secrets["x"] for r in second.records])

    @pytest.mark.parametrize("game, adversary, overrides, expected", [
        (GameId.SEARCH, "omniscient", {"leak_secret": True}, (8, 8, 8, 0)),
        (GameId.CP_SEARCH, "honest_decryptor", {}, (8, 8, 8, 0)),
        (GameId.SEARCH, "omniscient", {}, (0, 0, 0, 8)),
    ])
    def test_golden_tallies(self, game, adversary, overrides, expected, toy_preset):
        """Décomptes exacts (gains, A juste, B juste, violations) des jeux au résultat déterminé"""
        data = play(game, toy_preset, adversary, 8, seed=2024, **overrides).to_dict()
        tallies = data["tallies"]
        assert (data["wins"], tallies["a_correct"], tallies["b_correct"], data["violations"]) == expected
        assert tallies["a_only"] == tallies["b_only"] == 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
