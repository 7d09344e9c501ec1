# Interface en ligne de commande
from .main_app import build_parser, main, run
from .records import ResultRecord
