#!/usr/bin/env python3
"""
UnclonableLab - Point d'entrée principal
Lance l'interface en ligne de commande
"""

import sys
from pathlib import Path

# Ajouter le dossier src au path
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.main_app import main

if __name__ == "__main__":
    main()
