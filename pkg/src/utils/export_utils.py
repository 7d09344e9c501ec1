"""
Export Excel des essais d'une expérience
Une feuille par table (essais, résumé) avec le formatage de ExportConfig
"""

import numpy as np
import pandas as pd
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from openpyxl import Workbook
from openpyxl.styles import Font, PatternFill, Alignment, Border, Side
from openpyxl.utils.dataframe import dataframe_to_rows
from openpyxl.utils import get_column_letter

from ..core.config import ExportConfig

TRIALS_SHEET = "Essais"
SUMMARY_SHEET = "Résumé"


def _solid(hex_color: str) -> PatternFill:
    """Convertit une couleur hex (#RRGGBB) en remplissage openpyxl"""
    color = hex_color.lstrip('#').upper()
    return PatternFill(start_color=color, end_color=color, fill_type="solid")


class ExportUtils:
    """Classe utilitaire pour les exports tabulaires"""

    @staticmethod
    def flatten(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
        """Aplatit un dictionnaire imbriqué en clés pointées"""
        flat = {}
        for key, value in data.items():
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                flat.update(ExportUtils.flatten(value, f"{name}."))
            elif isinstance(value, (list, tuple)):
                flat[name] = ", ".join(str(v) for v in value)
            else:
                flat[name] = value
        return flat

    @staticmethod
    def _write_sheet(wb: Workbook, df: pd.DataFrame, sheet_name: str, config: ExportConfig):
        ws = wb.create_sheet(sheet_name)

        header_fill = _solid(config.header_bg_color)
        header_font = Font(bold=True, color=config.header_font_color.lstrip('#').upper(), size=11)
        header_alignment = Alignment(horizontal='center', vertical='center', wrap_text=True)
        alternate_fill = _solid(config.alternate_row_color)
        outcome_fills = {True: _solid(config.win_color), False: _solid(config.loss_color)}
        thin_border = Border(
            left=Side(style='thin'),
            right=Side(style='thin'),
            top=Side(style='thin'),
            bottom=Side(style='thin')
        )

        win_col = list(df.columns).index("win") + 1 if "win" in df.columns else None

        for r_idx, row in enumerate(dataframe_to_rows(df, index=False, header=True), start=1):
            for c_idx, value in enumerate(row, start=1):
                # Scalaires numpy de dataframe_to_rows
                if isinstance(value, np.generic):
                    value = value.item()
                cell = ws.cell(row=r_idx, column=c_idx, value=value)
                if config.add_borders:
                    cell.border = thin_border

                if r_idx == 1:
                    cell.fill = header_fill
                    cell.font = header_font
                    cell.alignment = header_alignment
                    continue

                cell.alignment = Alignment(vertical='center')
                # Issue de l'essai colorée, alternance ailleurs
                if c_idx == win_col and isinstance(value, bool):
                    cell.fill = outcome_fills[value]
                elif config.alternate_row_colors and r_idx % 2 == 0:
                    cell.fill = alternate_fill

        if config.auto_fit_columns:
            ExportUtils._auto_fit_columns(ws, df, config)

        if config.freeze_header:
            ws.freeze_panes = 'A2'

    @staticmethod
    def _auto_fit_columns(ws, df: pd.DataFrame, config: ExportConfig):
        """Ajuste la largeur des colonnes sur un échantillon de lignes"""
        for col_idx, col_name in enumerate(df.columns, start=1):
            max_length = len(str(col_name))
            for row_idx in range(2, min(len(df) + 2, config.autofit_sample_rows + 2)):
                cell_value = ws.cell(row=row_idx, column=col_idx).value
                if cell_value is not None:
                    max_length = max(max_length, len(str(cell_value)))
            width = min(max(max_length + 2, config.min_column_width), config.max_column_width)
            ws.column_dimensions[get_column_letter(col_idx)].width = width

    @staticmethod
    def write_trials_to_excel(
        df: pd.DataFrame,
        filepath: str,
        config: Optional[ExportConfig] = None,
        summary: Optional[Dict[str, Any]] = None
    ) -> Tuple[bool, Optional[str]]:
        """
        Écrit la table des essais (et le résumé aplati) dans un classeur neuf

        Returns:
            Tuple (succès, message d'erreur ou None)
        """
        config = config or ExportConfig()
        try:
            path = Path(filepath)
            path.parent.mkdir(parents=True, exist_ok=True)

            wb = Workbook()
            del wb[wb.active.title]

            ExportUtils._write_sheet(wb, df, TRIALS_SHEET, config)
            if summary:
                flat = ExportUtils.flatten(summary)
                summary_df = pd.DataFrame({"champ": list(flat), "valeur": [str(v) for v in flat.values()]})
                ExportUtils._write_sheet(wb, summary_df, SUMMARY_SHEET, config)

            wb.save(path)
            wb.close()
            return True, None

        except Exception as e:
            return False, str(e)
