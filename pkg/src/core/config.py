"""
Gestionnaire de configuration centralisé pour UnclonableLab
Sauvegarde/charge les préférences utilisateur, les plafonds de simulation
et les presets d'expériences (toy / paper)
"""

import json
import os
from pathlib import Path
from dataclasses import dataclass, field, asdict, fields
from typing import Dict, Any, Optional
from datetime import datetime

from .constants import WORKERS_ENV_VAR
from .errors import ConfigError


@dataclass
class SimulationConfig:
    """Plafonds et paramètres du simulateur"""
    # Vecteur d'état : 24 qubits = 256 Mo de complexes doubles
    statevector_cap: int = 24
    # Réalisation dense des Clifford (obfuscateur, conversions)
    dense_clifford_cap: int = 6
    # Formule GL exacte (opérateurs densifiés)
    gl_formula_cap: int = 12
    # Énumération exhaustive du groupe de Clifford
    twirl_enumeration_cap: int = 2
    # Échantillonneur par rejet des matrices contraintes
    sampler_max_attempts: int = 10000
    # Échantillons pour l'audit d'équivalence fonctionnelle
    equivalence_samples: int = 64


@dataclass
class GameDefaultsConfig:
    """Valeurs par défaut des jeux de sécurité"""
    default_trials: int = 1000
    default_preset: str = "toy"
    default_adversary: str = "random_guess"
    default_seed: int = 7
    keep_records: bool = False
    # Audit d'équivalence des hybrides 1 et 3 sans --audit
    audit_equivalence: bool = False


@dataclass
class PerformanceConfig:
    """Configuration des performances"""
    # 0 = parallélisme disponible (os.cpu_count)
    workers: int = 0
    use_threading: bool = True


@dataclass
class ExportConfig:
    """Configuration des exports Excel des essais"""
    freeze_header: bool = True
    auto_fit_columns: bool = True
    alternate_row_colors: bool = True
    add_borders: bool = True

    header_bg_color: str = "#1F4E79"
    header_font_color: str = "#FFFFFF"
    alternate_row_color: str = "#F2F2F2"
    win_color: str = "#C6EFCE"
    loss_color: str = "#FFC7CE"

    min_column_width: int = 8
    max_column_width: int = 40
    autofit_sample_rows: int = 100


@dataclass
class LogConfig:
    """Configuration des logs"""
    level: str = "INFO"  # DEBUG, INFO, WARNING, ERROR
    max_entries: int = 5000
    console: bool = True
    save_logs_to_file: bool = False
    log_dir: str = ""


@dataclass
class ModuleConfig:
    """Configuration d'une vérification spécifique"""
    enabled: bool = True
    last_used: Optional[str] = None
    settings: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AppConfig:
    """Configuration globale de l'application"""
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    games: GameDefaultsConfig = field(default_factory=GameDefaultsConfig)
    performance: PerformanceConfig = field(default_factory=PerformanceConfig)
    export: ExportConfig = field(default_factory=ExportConfig)
    log: LogConfig = field(default_factory=LogConfig)

    auto_save_config: bool = False
    presets_path: str = ""

    modules: Dict[str, ModuleConfig] = field(default_factory=dict)

    # Seuil DEBUG sans --log-level
    debug_mode: bool = False


@dataclass
class PresetConfig:
    """Preset nommé de paramètres d'expérience"""
    name: str
    description: str = ""
    # Rand-Expt / Search-Expt
    rand_n: int = 1
    rand_lambda: int = 1
    search_n: int = 0
    search_lambda: int = 1
    # UE / cUE
    ue_lambda: int = 22
    cue_lambda: int = 23
    msg_len: int = 8
    scheme: str = "full"  # full | toy
    toy_state_len: int = 2
    toy_pad_rows: int = 1
    # Programmes (PRF GGM, MAC, fonctions point)
    prf_input_len: int = 8
    prf_output_len: int = 8
    prf_seed_len: int = 16
    mac_prefix_len: int = 8
    ptfunc_lambda: int = 4


SECTION_CLASSES = {
    'simulation': SimulationConfig,
    'games': GameDefaultsConfig,
    'performance': PerformanceConfig,
    'export': ExportConfig,
    'log': LogConfig,
}

DEFAULT_PRESETS_PATH = Path(__file__).resolve().parent.parent.parent / "config" / "presets.json"


def load_presets(path: Optional[Path] = None) -> Dict[str, PresetConfig]:
    """Charge les presets nommés depuis le fichier JSON épinglé"""
    presets_path = Path(path) if path else DEFAULT_PRESETS_PATH
    try:
        with open(presets_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Impossible de lire les presets {presets_path}: {e}") from e

    known = {f.name for f in fields(PresetConfig)}
    presets = {}
    for name, values in data.get("presets", {}).items():
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Clés inconnues dans le preset '{name}': {sorted(unknown)}")
        presets[name] = PresetConfig(**{**values, "name": name})
    return presets


def get_preset(name: str, path: Optional[Path] = None) -> PresetConfig:
    """Récupère un preset par son nom"""
    presets = load_presets(path)
    if name not in presets:
        raise ConfigError(f"Preset inconnu: {name} (disponibles: {', '.join(sorted(presets))})")
    return presets[name]


def resolve_workers(flag: Optional[int] = None, configured: int = 0) -> int:
    """
    Détermine le nombre de workers

    Priorité: option explicite, variable d'environnement, configuration,
    puis parallélisme disponible.
    """
    if flag is not None and flag > 0:
        return flag

    env_value = os.environ.get(WORKERS_ENV_VAR, "").strip()
    if env_value:
        try:
            workers = int(env_value)
        except ValueError as e:
            raise ConfigError(f"{WORKERS_ENV_VAR} doit être un entier: {env_value!r}") from e
        if workers < 1:
            raise ConfigError(f"{WORKERS_ENV_VAR} doit être >= 1")
        return workers

    if configured > 0:
        return configured
    return os.cpu_count() or 1


class ConfigManager:
    """Gestionnaire de configuration avec persistance JSON"""

    DEFAULT_CONFIG_PATH = Path.home() / ".unclonablelab" / "config.json"

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = Path(config_path) if config_path else self.DEFAULT_CONFIG_PATH
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        self._config: Optional[AppConfig] = None

    @property
    def config(self) -> AppConfig:
        """Accès à la configuration, charge si nécessaire"""
        if self._config is None:
            self.load()
        return self._config

    def load(self) -> AppConfig:
        """Charge la configuration depuis le fichier JSON"""
        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    data = json.load(f)

                self._config = self._dict_to_config(data)

            except (json.JSONDecodeError, TypeError, KeyError) as e:
                print(f"Erreur de configuration, utilisation des valeurs par défaut: {e}")
                self._config = AppConfig()
        else:
            self._config = AppConfig()

        return self._config

    def _dict_to_config(self, data: dict) -> AppConfig:
        """Convertit un dictionnaire en AppConfig avec sous-configs"""
        sections = {
            name: cls(**data.pop(name)) if data.get(name) else cls()
            for name, cls in SECTION_CLASSES.items()
        }
        # Retirer les sections vides restantes
        for name in SECTION_CLASSES:
            data.pop(name, None)

        modules = {
            name: ModuleConfig(**mod_data) if isinstance(mod_data, dict) else mod_data
            for name, mod_data in data.pop('modules', {}).items()
        }

        return AppConfig(modules=modules, **sections, **data)

    def save(self) -> bool:
        """Sauvegarde la configuration dans le fichier JSON"""
        try:
            data = asdict(self.config)

            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(data, f, indent=2, ensure_ascii=False, default=str)

            return True
        except Exception as e:
            print(f"Erreur lors de la sauvegarde de la configuration: {e}")
            return False

    def get(self, key: str, default: Any = None) -> Any:
        """Récupère une valeur de configuration par clé (notation pointée)"""
        value = self.config

        for k in key.split('.'):
            if hasattr(value, k):
                value = getattr(value, k)
            elif isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def set(self, key: str, value: Any, persist: bool = True) -> None:
        """Définit une valeur de configuration (notation pointée) ; persist=False la limite à la session"""
        keys = key.split('.')

        obj = self.config
        for k in keys[:-1]:
            if not hasattr(obj, k):
                return
            obj = getattr(obj, k)

        if not hasattr(obj, keys[-1]):
            return
        setattr(obj, keys[-1], value)

        if persist and self.config.auto_save_config:
            self.save()

    def get_module_config(self, module_name: str) -> ModuleConfig:
        """Récupère la configuration d'une vérification"""
        if module_name not in self.config.modules:
            self.config.modules[module_name] = ModuleConfig()
        return self.config.modules[module_name]

    def set_module_setting(self, module_name: str, key: str, value: Any) -> None:
        """Définit un paramètre pour une vérification"""
        mod_config = self.get_module_config(module_name)
        mod_config.settings[key] = value
        mod_config.last_used = datetime.now().isoformat()
        if self.config.auto_save_config:
            self.save()

    def presets(self) -> Dict[str, PresetConfig]:
        """Presets disponibles (chemin configurable)"""
        path = Path(self.config.presets_path) if self.config.presets_path else None
        return load_presets(path)


# Configuration active du processus
_active_config: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """Configuration active (valeurs par défaut si aucune n'est installée)"""
    global _active_config
    if _active_config is None:
        _active_config = AppConfig()
    return _active_config


def set_config(config: AppConfig) -> None:
    """Installe la configuration active"""
    global _active_config
    _active_config = config
