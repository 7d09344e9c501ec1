# Utilities module
from .file_utils import FileUtils
from .validators import Validators
from .stats_utils import StatsUtils
from .export_utils import ExportUtils
