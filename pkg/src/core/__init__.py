# Core module
from .config import ConfigManager, AppConfig, PresetConfig, get_preset, load_presets, resolve_workers
from .logger import Logger, LogLevel, get_logger, set_logger
from .constants import APP_INFO, GameId
from .errors import LabError
