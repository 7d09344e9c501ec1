"""
Tests de l'interface en ligne de commande
"""

import json
import pytest
import sys
from pathlib import Path

from jsonschema import Draft7Validator

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import ResultRecord, run
from src.cli.main_app import BEST_POSSIBLE, REDUCTIONS
from src.core.constants import (
    APP_INFO, CHECK_IDS, EXIT_ASSERTION_FAILED, EXIT_OK, EXIT_USAGE, SCHEMA_VERSION, GameId
)
from src.core.logger import LogLevel, get_logger
from src.games import GameConfig, builtin_adversary, run_game
from src.modules import get_check

SCHEMA_PATH = Path(__file__).parent.parent / "docs" / "result_schema.json"


@pytest.fixture
def lab(temp_directory):
    """run() isolé : configuration temporaire, pas de console, un worker"""
    config = str(Path(temp_directory) / "config.json")

    def invoke(*argv):
        return run(["--config", config, "--quiet", *argv])

    return invoke


def _load(path) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


class TestUsage:
    """Erreurs d'usage : code 2"""

    def test_no_command(self, lab):
        assert lab() == EXIT_USAGE

    def test_unknown_game(self, lab):
        assert lab("game", "inconnu") == EXIT_USAGE

    def test_bad_trials(self, lab):
        assert lab("game", "rand", "--trials", "0") == EXIT_USAGE

    def test_bad_seed(self, lab):
        assert lab("game", "rand", "--seed", "-1") == EXIT_USAGE

    def test_expect_out_of_range(self, lab):
        assert lab("game", "rand", "--expect", "1.5") == EXIT_USAGE

    def test_bad_output_extension(self, lab, temp_directory):
        assert lab("game", "rand", "--out", str(Path(temp_directory) / "r.txt")) == EXIT_USAGE

    def test_unknown_preset(self, lab):
        assert lab("game", "rand", "--trials", "2", "--preset", "inconnu") == EXIT_USAGE

    def test_option_foreign_to_check(self, lab):
        assert lab("check", "twirl", "--trials", "3") == EXIT_USAGE

    def test_version(self, capsys):
        assert run(["--version"]) == EXIT_OK
        assert APP_INFO["version"] in capsys.readouterr().out


class TestCatalogue:
    def test_list(self, lab, capsys):
        assert lab("list") == EXIT_OK
        out = capsys.readouterr().out
        for name in (*GameId.ALL, *REDUCTIONS, BEST_POSSIBLE, "toy", "paper"):
            assert name in out
        for check_id in CHECK_IDS:
            assert get_check(check_id).get_metadata()["description"] in out


class TestGameCommand:
    """Sous-commande game"""

    def test_expect_passes(self, lab):
        code = lab("game", "rand", "--trials", "200", "--workers", "1",
                   "--adversary", "random_guess", "--expect", "0.25")
        assert code == EXIT_OK

    def test_expect_fails(self, lab):
        code = lab("game", "rand", "--trials", "50", "--workers", "1",
                   "--adversary", "random_guess", "--expect", "1.0")
        assert code == EXIT_ASSERTION_FAILED

    def test_json_output(self, lab, temp_directory):
        out = Path(temp_directory) / "res" / "ue.json"
        assert lab("game", "ue", "--trials", "4", "--workers", "1", "--out", str(out)) == EXIT_OK
        data = _load(out)
        assert data["schema_version"] == SCHEMA_VERSION
        assert data["kind"] == "game"
        assert data["spec"]["game"] == GameId.UE
        assert data["result"]["trials"] == 4
        assert data["verdict"] is None
        assert data["run_info"]["workers"] == 1

    def test_same_seed_same_document(self, lab, temp_directory):
        paths = [Path(temp_directory) / f"run{i}.json" for i in (1, 2)]
        for workers, path in zip(("1", "3"), paths):
            lab("game", "cue", "--trials", "20", "--seed", "11", "--workers", workers, "--out", str(path))
        first, second = (_load(p) for p in paths)
        for data in (first, second):
            data.pop("run_info")
            data["spec"]["config"].pop("workers")
        assert first == second

    def test_excel_export(self, lab, temp_directory):
        xlsx = Path(temp_directory) / "essais.xlsx"
        assert lab("game", "ue", "--trials", "3", "--workers", "1", "--xlsx", str(xlsx)) == EXIT_OK
        assert xlsx.exists()

    def test_decision_options(self, lab, temp_directory):
        out = Path(temp_directory) / "h1.json"
        code = lab("game", "cp-decision", "--trials", "2", "--workers", "1", "--hybrid", "1",
                   "--audit", "--out", str(out))
        assert code == EXIT_OK
        assert _load(out)["spec"]["config"]["hybrid"] == 1


class TestCoverage:
    """Chaque jeu, réduction et vérification s'exécute depuis la CLI"""

    @pytest.mark.parametrize("game", GameId.ALL)
    def test_games(self, lab, game):
        assert lab("game", game, "--trials", "2", "--workers", "1") == EXIT_OK

    @pytest.mark.parametrize("reduction", tuple(REDUCTIONS) + (BEST_POSSIBLE,))
    def test_reductions(self, lab, reduction):
        assert lab("reduce", reduction, "--trials", "2", "--workers", "1") == EXIT_OK

    @pytest.mark.parametrize("argv", [
        ("twirl", "--instances", "3"),
        ("purified-gap", "--queries", "1", "--unitaries", "1"),
        ("hybrid-decision", "--trials", "2", "--adversary", "give_all_to_A", "--workers", "1"),
    ])
    def test_deterministic_checks(self, lab, argv):
        assert lab("check", *argv) == EXIT_OK

    @pytest.mark.parametrize("argv", [
        ("gl", "--bits", "1", "--instances", "1", "--runs", "200"),
        ("otp-correctness", "--cliffords", "2", "--samples", "5"),
    ])
    def test_statistical_checks(self, lab, argv):
        assert lab("check", *argv) in (EXIT_OK, EXIT_ASSERTION_FAILED)

    def test_check_json(self, lab, temp_directory):
        out = Path(temp_directory) / "twirl.json"
        assert lab("check", "twirl", "--instances", "2", "--out", str(out)) == EXIT_OK
        data = _load(out)
        assert data["kind"] == "check"
        assert data["verdict"]["passed"] is True
        assert data["spec"]["params"]["instances"] == 2


class TestResultSchema:
    """Les documents écrits par --out respectent docs/result_schema.json"""

    @pytest.fixture(scope="class")
    def validator(self):
        return Draft7Validator(_load(SCHEMA_PATH))

    @pytest.mark.parametrize("argv", [
        ("game", "cue", "--trials", "3", "--workers", "1"),
        ("game", "rand", "--trials", "20", "--workers", "1", "--expect", "0.25"),
        ("reduce", "ptfunc", "--trials", "2", "--workers", "1"),
        ("check", "twirl", "--instances", "2"),
    ])
    def test_document_is_valid(self, lab, temp_directory, validator, argv):
        out = Path(temp_directory) / "doc.json"
        lab(*argv, "--out", str(out))
        errors = [e.message for e in validator.iter_errors(_load(out))]
        assert errors == []

    def test_schema_version_pinned(self, validator):
        assert validator.schema["properties"]["schema_version"]["const"] == SCHEMA_VERSION


class TestShowCommand:
    """Relecture d'un document par la sous-commande show"""

    def test_show_game(self, lab, temp_directory, capsys):
        out = Path(temp_directory) / "rand.json"
        lab("game", "rand", "--trials", "4", "--workers", "1", "--out", str(out))
        capsys.readouterr()
        assert lab("show", str(out)) == EXIT_OK
        assert "rand contre random_guess" in capsys.readouterr().out

    def test_show_failed_assertion(self, lab, temp_directory):
        out = Path(temp_directory) / "echec.json"
        code = lab("game", "rand", "--trials", "50", "--workers", "1", "--expect", "1.0", "--out", str(out))
        assert code == EXIT_ASSERTION_FAILED
        assert lab("show", str(out)) == EXIT_ASSERTION_FAILED

    def test_show_missing_file(self, lab, temp_directory):
        assert lab("show", str(Path(temp_directory) / "absent.json")) == EXIT_USAGE


class TestConfigurationOptions:
    """Fichier de configuration, --set et rapport d'erreurs"""

    def _write_config(self, temp_directory, data: dict):
        path = Path(temp_directory) / "config.json"
        path.write_text(json.dumps(data), encoding="utf-8")

    def test_check_uses_configured_presets(self, lab, temp_directory, custom_presets_file):
        self._write_config(temp_directory, {"presets_path": custom_presets_file})
        argv = ("--preset", "custom", "--trials", "2", "--workers", "1")
        assert lab("game", "cp-decision", *argv) == EXIT_OK
        assert lab("check", "hybrid-decision", *argv, "--adversary", "give_all_to_A") == EXIT_OK

    def test_set_override(self, lab, temp_directory):
        out = Path(temp_directory) / "r.json"
        assert lab("--set", "games.default_trials=3", "game", "rand", "--workers", "1",
                   "--out", str(out)) == EXIT_OK
        assert _load(out)["result"]["trials"] == 3

    def test_set_unknown_key(self, lab):
        assert lab("--set", "games.inconnu=3", "list") == EXIT_USAGE
        assert lab("--set", "games.default_trials", "list") == EXIT_USAGE

    def test_debug_mode(self, lab):
        assert lab("--set", "debug_mode=true", "list") == EXIT_OK
        assert get_logger().level == LogLevel.DEBUG

    def test_configured_audit(self, lab, temp_directory):
        out = Path(temp_directory) / "h1.json"
        code = lab("--set", "games.audit_equivalence=true", "game", "cp-decision", "--hybrid", "1",
                   "--trials", "2", "--workers", "1", "--out", str(out))
        assert code == EXIT_OK
        assert _load(out)["spec"]["config"]["audit_equivalence"] is True

    def test_error_report(self, lab, temp_directory):
        report = Path(temp_directory) / "rapport.txt"
        code = lab("--error-report", str(report), "game", "rand", "--trials", "2", "--preset", "inconnu")
        assert code == EXIT_USAGE
        content = report.read_text(encoding="utf-8")
        assert "Preset inconnu" in content
        assert "code de sortie: 2" in content

    def test_no_report_without_errors(self, lab, temp_directory):
        report = Path(temp_directory) / "rapport.txt"
        assert lab("--error-report", str(report), "list") == EXIT_OK
        assert not report.exists()


class TestResultRecord:
    def test_passed_without_verdict(self):
        assert ResultRecord.create("game", {}, 0.1).passed

    def test_deterministic_part(self):
        record = ResultRecord.create("check", {"check": "gl"}, 0.5, verdict={"passed": False})
        assert not record.passed
        assert "run_info" not in record.deterministic_part()
        assert record.to_dict()["run_info"]["elapsed"] == 0.5

    def test_round_trip(self, lab, temp_directory):
        out = Path(temp_directory) / "cue.json"
        lab("game", "cue", "--trials", "3", "--workers", "1", "--out", str(out))
        record, error = ResultRecord.load(str(out))
        assert error is None
        assert record.to_dict() == _load(out)

        copy = Path(temp_directory) / "copie.json"
        assert record.save(str(copy)) == (True, None)
        assert _load(copy) == _load(out)

    def test_load_rejects_other_schema(self, temp_directory):
        path = Path(temp_directory) / "ancien.json"
        path.write_text(json.dumps({"schema_version": "0.1", "kind": "game"}), encoding="utf-8")
        record, error = ResultRecord.load(str(path))
        assert record is None
        assert "0.1" in error

    def test_load_missing_fields(self, temp_directory):
        path = Path(temp_directory) / "incomplet.json"
        path.write_text(json.dumps({"schema_version": SCHEMA_VERSION, "kind": "game"}), encoding="utf-8")
        record, error = ResultRecord.load(str(path))
        assert record is None
        assert "spec" in error

    def test_elapsed_moves_to_run_info(self, toy_preset):
        """La durée de run_game reste hors de la partie déterministe"""
        result = run_game(GameConfig.from_preset(GameId.UE, toy_preset, trials=3), builtin_adversary("random_guess"))
        assert result.elapsed > 0
        assert "elapsed" not in result.to_dict()
        record = ResultRecord.for_game("game", {"game": GameId.UE}, result, workers=1)
        assert record.run_info["elapsed"] == round(result.elapsed, 6)
        assert record.result == result.to_dict()



if __name__ == "__main__":
    pytest.main([__file__, "-v"])
