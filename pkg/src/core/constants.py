"""
Constantes globales de l'application UnclonableLab
"""

# Informations de l'application
APP_INFO = {
    "name": "UnclonableLab",
    "version": "1.0.0",
    "author": "Edvance",
    "description": "Laboratoire de simulation de chiffrement inclonable et d'obfuscation quantique",
}

# Version du schéma JSON des résultats
SCHEMA_VERSION = "1.0"

# Codes de sortie de la ligne de commande
EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_USAGE = 2

# Variable d'environnement pour le nombre de workers
WORKERS_ENV_VAR = "UNCLONABLELAB_WORKERS"

# Tolérances numériques
UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
SIGMA_THRESHOLD = 3.0
CHI2_SIGNIFICANCE = 0.001


# Identifiants des jeux de sécurité
class GameId:
    RAND = "rand"
    SEARCH = "search"
    UE = "ue"
    CUE = "cue"
    CP_DECISION = "cp-decision"
    CP_SEARCH = "cp-search"
    CP_PTFUNC = "cp-ptfunc"

    ALL = (RAND, SEARCH, UE, CUE, CP_DECISION, CP_SEARCH, CP_PTFUNC)


# Adversaires prédéfinis
BUILTIN_ADVERSARIES = (
    "random_guess",
    "give_all_to_A",
    "give_all_to_B",
    "split_halves",
    "echo_breidbart",
    "honest_decryptor",
)

# Vérifications exposées par la CLI
CHECK_IDS = ("twirl", "gl", "hybrid-decision", "otp-correctness", "purified-gap")


# États d'une vérification
class CheckStatus:
    PENDING = "pending"
    RUNNING = "running"
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


# Icônes des états (résumé console)
STATUS_ICONS = {
    CheckStatus.PENDING: "⏳",
    CheckStatus.RUNNING: "🔄",
    CheckStatus.PASS: "✅",
    CheckStatus.FAIL: "❌",
    CheckStatus.ERROR: "⚠️",
}

# Niveaux de log
LOG_LEVELS = {
    "DEBUG": 10,
    "INFO": 20,
    "WARNING": 30,
    "ERROR": 40,
    "CRITICAL": 50,
}
