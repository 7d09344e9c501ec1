"""
Interface en ligne de commande UnclonableLab

Sous-commandes :
    game <id>        joue un jeu de sécurité contre un adversaire de référence
    reduce <nom>     rejoue un adversaire à travers une réduction
    check <id>       lance une vérification numérique
    list             affiche les jeux, adversaires, réductions et presets
    show <fichier>   relit un résultat JSON et rappelle son verdict

Codes de sortie : 0 succès, 1 assertion en échec, 2 usage invalide.
"""

import argparse
import json
import signal
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from ..core.config import ConfigManager, AppConfig, PresetConfig, get_preset, load_presets, resolve_workers, set_config
from ..core.constants import (
    APP_INFO, BUILTIN_ADVERSARIES, CHECK_IDS, EXIT_ASSERTION_FAILED, EXIT_OK, EXIT_USAGE, GameId,
)
from ..core.errors import EquivalenceFailure, LabError
from ..core.logger import Logger, LogLevel, get_logger, set_logger
from ..games import (
    Adversary, GameConfig, GameResult, best_possible_wrapper, builtin_adversary, cue_to_rand,
    decision_cp, ptfunc, rand_to_search, run_game, search_cp, search_guess,
)
from ..modules import CHECKS, get_check
from ..utils.export_utils import ExportUtils
from ..utils.stats_utils import StatsUtils
from ..utils.validators import Validators
from .records import ResultRecord

SOURCE = "cli"

# Réductions : constructeur (adversaire interne, preset) -> adversaire du jeu cible
REDUCTIONS: Dict[str, Callable[[Adversary, PresetConfig], Any]] = {
    "search_guess": lambda inner, p: search_guess(inner, p.rand_n, p.rand_lambda),
    "rand_to_search": lambda inner, p: rand_to_search(inner, p.rand_n, p.rand_lambda),
    "cue_to_rand": lambda inner, p: cue_to_rand(inner, p.cue_lambda, p.msg_len),
    "decision_cp": decision_cp,
    "search_cp": search_cp,
    "ptfunc": ptfunc,
}
BEST_POSSIBLE = "best_possible"
CP_GAMES = (GameId.CP_DECISION, GameId.CP_SEARCH, GameId.CP_PTFUNC)


class UsageError(Exception):
    """Option invalide détectée après l'analyse des arguments"""


# =============================================================================
# Types des options
# =============================================================================

def _seed(value: str) -> int:
    valid, error = Validators.validate_seed(value)
    if not valid:
        raise argparse.ArgumentTypeError(error)
    return int(value)


def _positive(value: str) -> int:
    valid, error, number = Validators.validate_integer(value, 1)
    if not valid:
        raise argparse.ArgumentTypeError(error)
    return number


def _natural(value: str) -> int:
    valid, error, number = Validators.validate_integer(value, 0)
    if not valid:
        raise argparse.ArgumentTypeError(error)
    return number


def _rate(value: str) -> float:
    try:
        rate = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Taux non numérique: {value}")
    if not 0.0 <= rate <= 1.0:
        raise argparse.ArgumentTypeError(f"Taux hors de [0, 1]: {rate}")
    return rate


class LabArgumentParser(argparse.ArgumentParser):
    """Les erreurs d'analyse remontent au lieu de quitter le processus"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument("--adversary", choices=BUILTIN_ADVERSARIES, help="Adversaire de référence")
    parser.add_argument("--trials", type=_positive, help="Nombre d'essais")
    parser.add_argument("--seed", type=_seed, help="Graine maîtresse (entier 64 bits non signé)")
    parser.add_argument("--preset", help="Preset nommé (toy, paper)")
    parser.add_argument("--workers", type=_positive, help="Nombre de workers")
    parser.add_argument("--keep-records", action="store_true", help="Conserver le détail des essais")
    parser.add_argument("--out", help="Fichier JSON de résultat")
    parser.add_argument("--xlsx", help="Export Excel des essais")
    parser.add_argument("--expect", type=_rate, help="Taux attendu (assertion à 3σ)")


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        prog="unclonablelab",
        description=APP_INFO["description"],
    )
    parser.add_argument("--version", action="version", version=f"{APP_INFO['name']} {APP_INFO['version']}")
    parser.add_argument("--config", help="Fichier de configuration JSON")
    parser.add_argument("--log-level", choices=[level.name for level in LogLevel], help="Seuil des logs")
    parser.add_argument("--quiet", action="store_true", help="Pas de logs sur la console")
    parser.add_argument("--error-report", help="Rapport des erreurs et avertissements (texte)")
    parser.add_argument("--set", action="append", metavar="CLÉ=VALEUR", default=[],
                        help="Surcharge de configuration pour cette exécution (notation pointée)")

    sub = parser.add_subparsers(dest="command", parser_class=LabArgumentParser)
    sub.required = True

    game = sub.add_parser("game", help="Jouer un jeu de sécurité")
    game.add_argument("game_id", choices=GameId.ALL)
    _add_run_options(game)
    game.add_argument("--hybrid", type=int, choices=(0, 1, 2, 3), help="Hybride de CP-Expt-Decision")
    game.add_argument("--audit", action="store_true", help="Audit d'équivalence des hybrides")
    game.add_argument("--key-testing", action="store_true", help="Schéma compilé avec test de clé")
    game.add_argument("--bit-variant", action="store_true", help="UE à message d'un bit")

    reduce = sub.add_parser("reduce", help="Jouer un adversaire à travers une réduction")
    reduce.add_argument("reduction", choices=tuple(REDUCTIONS) + (BEST_POSSIBLE,))
    _add_run_options(reduce)
    reduce.add_argument("--game", choices=CP_GAMES, default=GameId.CP_DECISION,
                        help=f"Jeu cible de {BEST_POSSIBLE}")

    check = sub.add_parser("check", help="Lancer une vérification numérique")
    check.add_argument("check_id", choices=CHECK_IDS)
    check.add_argument("--seed", type=_seed)
    check.add_argument("--out", help="Fichier JSON de résultat")
    check.add_argument("--qubits", type=_positive, help="twirl : qubits du groupe énuméré")
    check.add_argument("--bits", type=_positive, help="gl : longueur m de la chaîne cachée")
    check.add_argument("--instances", type=_positive, help="twirl, gl : instances aléatoires")
    check.add_argument("--runs", type=_positive, help="gl : extractions par instance")
    check.add_argument("--queries", type=_natural, help="purified-gap : requêtes q")
    check.add_argument("--unitaries", type=_positive, help="purified-gap : unitaires adverses")
    check.add_argument("--cliffords", type=_positive, help="otp-correctness : Clifford tirés")
    check.add_argument("--samples", type=_positive, help="otp-correctness : échantillons de mélange")
    check.add_argument("--lam-pad", type=_natural, help="otp-correctness : qubits de remplissage")
    check.add_argument("--trials", type=_positive, help="hybrid-decision : essais par hybride")
    check.add_argument("--preset", help="hybrid-decision : preset")
    check.add_argument("--adversary", choices=BUILTIN_ADVERSARIES, help="hybrid-decision : adversaire")
    check.add_argument("--workers", type=_positive)

    sub.add_parser("list", help="Afficher le catalogue")

    show = sub.add_parser("show", help="Relire un résultat JSON")
    show.add_argument("record", help="Fichier écrit par --out")
    return parser


# =============================================================================
# Exécution
# =============================================================================

_MISSING = object()


def _apply_overrides(manager: ConfigManager, items: List[str]):
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or manager.get(key, _MISSING) is _MISSING:
            raise UsageError(f"--set: clé de configuration inconnue ou valeur absente: {item}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        manager.set(key, value, persist=False)


def _setup(args) -> ConfigManager:
    manager = ConfigManager(Path(args.config)) if args.config else ConfigManager()
    _apply_overrides(manager, args.set)
    config = manager.config
    set_config(config)
    if args.log_level:
        level = LogLevel.from_name(args.log_level)
    else:
        level = LogLevel.DEBUG if config.debug_mode else LogLevel.from_name(config.log.level)
    log_dir = Path(config.log.log_dir) if config.log.log_dir else None
    set_logger(Logger(
        log_dir=log_dir,
        level=level,
        max_entries=config.log.max_entries,
        to_file=config.log.save_logs_to_file,
        console=config.log.console and not args.quiet,
    ))
    return manager


def _check_paths(args):
    for option, extensions in (("out", (".json",)), ("xlsx", (".xlsx",))):
        path = getattr(args, option, None)
        if path:
            valid, error = Validators.validate_output_path(path, extensions)
            if not valid:
                raise UsageError(f"--{option}: {error}")


def _presets_path(config: AppConfig) -> Optional[Path]:
    return Path(config.presets_path) if config.presets_path else None


def _preset(args, config: AppConfig) -> PresetConfig:
    return get_preset(args.preset or config.games.default_preset, _presets_path(config))


def _base_overrides(args, config: AppConfig) -> Dict[str, Any]:
    return {
        "trials": args.trials or config.games.default_trials,
        "seed": args.seed if args.seed is not None else config.games.default_seed,
        "workers": args.workers,
        "keep_records": args.keep_records or bool(args.xlsx) or config.games.keep_records,
    }


def _game_config(args, config: AppConfig) -> GameConfig:
    overrides = _base_overrides(args, config)
    if args.hybrid is not None:
        overrides["hybrid"] = args.hybrid
    if args.audit or config.games.audit_equivalence:
        overrides["audit_equivalence"] = True
    if args.key_testing:
        overrides["key_testing"] = True
    if args.bit_variant:
        overrides["ue_bit_variant"] = True
    return GameConfig.from_preset(args.game_id, _preset(args, config), **overrides)


def _verdict(result: GameResult, expected: Optional[float]) -> Optional[Dict[str, Any]]:
    if expected is None:
        return None
    passed = StatsUtils.within_sigma(result.win_rate, expected, result.trials)
    return {"passed": passed, "expected": expected, "observed": result.win_rate}


def _print_result(title: str, result: GameResult, verdict: Optional[Dict[str, Any]]):
    low, high = result.interval
    print(f"{title}: {result.wins}/{result.trials} = {result.win_rate:.4f} "
          f"[IC 95 % {low:.4f}, {high:.4f}], violations {result.violations}")
    print(f"  A correct {result.a_correct}, B correct {result.b_correct}, "
          f"A seul {result.a_only}, B seul {result.b_only}")
    if verdict is not None:
        status = "PASS" if verdict["passed"] else "FAIL"
        print(f"  {status}: attendu {verdict['expected']:.4f} (3σ)")


def _emit(args, config: AppConfig, record: ResultRecord, result: Optional[GameResult] = None) -> int:
    if args.out:
        ok, error = record.save(args.out)
        if not ok:
            get_logger().error(f"Écriture impossible de {args.out}: {error}", SOURCE)
            return EXIT_USAGE
        get_logger().info(f"Résultat écrit dans {args.out}", SOURCE)
    if result is not None and getattr(args, "xlsx", None):
        ok, error = ExportUtils.write_trials_to_excel(
            result.to_dataframe(), args.xlsx, config.export, summary=result.to_dict()
        )
        if not ok:
            get_logger().error(f"Export Excel impossible vers {args.xlsx}: {error}", SOURCE)
            return EXIT_USAGE
        get_logger().info(f"Essais exportés dans {args.xlsx}", SOURCE)
    return EXIT_OK if record.passed else EXIT_ASSERTION_FAILED


def _play(args, config: AppConfig, kind: str, game_config: GameConfig, adversary: Adversary,
          spec: Dict[str, Any], title: str) -> int:
    result = run_game(game_config, adversary)
    verdict = _verdict(result, args.expect)
    _print_result(title, result, verdict)
    workers = resolve_workers(game_config.workers, config.performance.workers)
    record = ResultRecord.for_game(kind, spec, result, workers, verdict)
    return _emit(args, config, record, result)


def _run_game(args, config: AppConfig) -> int:
    game_config = _game_config(args, config)
    name = args.adversary or config.games.default_adversary
    spec = {"game": args.game_id, "adversary": name, "preset": args.preset or config.games.default_preset,
            "config": game_config.to_dict()}
    return _play(args, config, "game", game_config, builtin_adversary(name), spec,
                 f"{args.game_id} contre {name}")


def _run_reduction(args, config: AppConfig) -> int:
    preset = _preset(args, config)
    overrides = _base_overrides(args, config)
    inner = builtin_adversary(args.adversary or config.games.default_adversary)
    if args.reduction == BEST_POSSIBLE:
        adversary = best_possible_wrapper(inner)
        game_config = GameConfig.from_preset(args.game, preset, **overrides)
    else:
        adversary = REDUCTIONS[args.reduction](inner, preset)
        game_config = adversary.target_config(**overrides)
    spec = {"reduction": args.reduction, "adversary": adversary.name, "preset": preset.name,
            "config": game_config.to_dict()}
    return _play(args, config, "reduction", game_config, adversary, spec,
                 f"{game_config.game} contre {adversary.name}")


CHECK_OPTIONS = ("seed", "qubits", "bits", "instances", "runs", "queries", "unitaries",
                 "cliffords", "samples", "lam_pad", "trials", "preset", "adversary", "workers")


def _cancel_on_interrupt(check):
    """Ctrl+C arrête la vérification à la prochaine instance ; retourne l'ancien gestionnaire"""
    def handler(signum, frame):
        check.cancel_execution()
    try:
        return signal.signal(signal.SIGINT, handler)
    except ValueError:
        # hors du thread principal
        return None


def _run_check(args, config: AppConfig) -> int:
    params = {key: getattr(args, key) for key in CHECK_OPTIONS if getattr(args, key) is not None}
    check = get_check(args.check_id)(config_manager=args.config_manager, **params)
    logger = get_logger()
    check.set_progress_callback(lambda p: logger.debug(f"{args.check_id}: {p:.0%}", SOURCE))
    previous = _cancel_on_interrupt(check)
    try:
        verdict = check.run()
    finally:
        if previous is not None:
            signal.signal(signal.SIGINT, previous)
    print(verdict.summary())
    record = ResultRecord.create("check", {"check": args.check_id, "params": verdict.params},
                                 verdict.elapsed, verdict=verdict.to_dict())
    return _emit(args, config, record)


def _run_list(args, config: AppConfig) -> int:
    print("Jeux        : " + ", ".join(GameId.ALL))
    print("Adversaires : " + ", ".join(BUILTIN_ADVERSARIES))
    print("Réductions  : " + ", ".join(tuple(REDUCTIONS) + (BEST_POSSIBLE,)))
    print("Vérifications :")
    for check_id in CHECK_IDS:
        meta = CHECKS[check_id].get_metadata()
        defaults = ", ".join(f"{k}={v}" for k, v in meta["defaults"].items())
        print(f"  {meta['id']}: {meta['description']} ({defaults})")
    for name, preset in load_presets(_presets_path(config)).items():
        print(f"Preset {name}: {preset.description}")
    return EXIT_OK


def _run_show(args, config: AppConfig) -> int:
    record, error = ResultRecord.load(args.record)
    if error:
        print(f"Erreur: {error}", file=sys.stderr)
        return EXIT_USAGE
    run_info = ", ".join(f"{k}={v}" for k, v in record.run_info.items())
    print(f"{record.kind} ({record.artifact_version}) : {run_info}")
    if record.result is not None:
        result = record.result
        print(f"  {result['game']} contre {result['adversary']}: "
              f"{result['wins']}/{result['trials']} = {result['win_rate']:.4f}")
    if record.verdict is not None:
        status = "PASS" if record.passed else "FAIL"
        print(f"  {status} {record.verdict.get('message', '')}".rstrip())
    return EXIT_OK if record.passed else EXIT_ASSERTION_FAILED


COMMANDS = {
    "game": _run_game,
    "reduce": _run_reduction,
    "check": _run_check,
    "list": _run_list,
    "show": _run_show,
}


def run(argv: Optional[List[str]] = None) -> int:
    """Analyse argv, exécute la sous-commande et retourne le code de sortie"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_paths(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help, --version
        return e.code if isinstance(e.code, int) else EXIT_OK

    try:
        manager = _setup(args)
        args.config_manager = manager
        code = COMMANDS[args.command](args, manager.config)
    except UsageError as e:
        print(e, file=sys.stderr)
        code = EXIT_USAGE
    except EquivalenceFailure as e:
        get_logger().error(f"Équivalence fonctionnelle rompue: {e}", SOURCE)
        code = EXIT_ASSERTION_FAILED
    except LabError as e:
        get_logger().error(str(e), SOURCE)
        print(f"Erreur: {e}", file=sys.stderr)
        code = EXIT_USAGE

    if args.error_report:
        _write_error_report(args, code)
    return code


def _write_error_report(args, code: int):
    logger = get_logger()
    stats = {
        "commande": args.command,
        "code de sortie": code,
        "erreurs": logger.error_count,
        "avertissements": logger.warning_count,
    }
    path = logger.save_error_report(Path(args.error_report), stats)
    if path is not None:
        print(f"Rapport d'erreurs: {path}", file=sys.stderr)


def main():
    sys.exit(run(sys.argv[1:]))
