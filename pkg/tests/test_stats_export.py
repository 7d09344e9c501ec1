"""
Tests des utilitaires statistiques et de l'export Excel
"""

import pytest
import sys
from pathlib import Path

import numpy as np
import pandas as pd
from openpyxl import load_workbook

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.config import ExportConfig
from src.utils.export_utils import SUMMARY_SHEET, TRIALS_SHEET, ExportUtils
from src.utils.stats_utils import StatsUtils


class TestWilson:
    def test_contains_rate(self):
        low, high = StatsUtils.wilson_interval(25, 100)
        assert low < 0.25 < high
        assert high - low < 0.2

    def test_extremes_are_clipped(self):
        low, high = StatsUtils.wilson_interval(0, 10)
        assert low == 0.0
        assert 0 < high < 1
        assert StatsUtils.wilson_interval(10, 10)[1] == 1.0

    def test_no_trials(self):
        assert StatsUtils.wilson_interval(0, 0) == (0.0, 1.0)


class TestSigma:
    def test_sigma(self):
        assert StatsUtils.sigma(0.5, 100) == pytest.approx(0.05)
        assert StatsUtils.sigma(0.5, 0) == float("inf")

    def test_within_sigma(self):
        assert StatsUtils.within_sigma(0.30, 0.25, 1000) is False
        assert StatsUtils.within_sigma(0.26, 0.25, 1000)

    def test_degenerate_floor(self):
        """Taux attendu 1 : tolérance minimale d'un essai"""
        assert StatsUtils.within_sigma(0.99, 1.0, 100)
        assert not StatsUtils.within_sigma(0.95, 1.0, 100)


class TestUniformity:
    def test_chi_square_uniform(self):
        assert StatsUtils.chi_square_uniform([250, 248, 252, 250])[0]
        assert not StatsUtils.chi_square_uniform([900, 50, 25, 25])[0]

    def test_same_distribution(self):
        assert StatsUtils.chi_square_same_distribution([100, 100, 0], [98, 102, 0])[0]
        assert not StatsUtils.chi_square_same_distribution([200, 0], [0, 200])[0]

    def test_single_category(self):
        assert StatsUtils.chi_square_same_distribution([5, 0], [7, 0]) == (True, 1.0)

    def test_monobit(self, rng):
        assert StatsUtils.monobit_test(rng.integers(2, size=10000))[0]
        assert not StatsUtils.monobit_test(np.ones(1000, dtype=int))[0]
        assert StatsUtils.monobit_test([]) == (True, 1.0)


class TestTraceDistance:
    def test_orthogonal_states(self):
        assert StatsUtils.trace_distance(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(1.0)

    def test_identical(self):
        rho = np.eye(4) / 4
        assert StatsUtils.trace_distance(rho, rho) == pytest.approx(0.0)


class TestExport:
    """Export des essais vers Excel"""

    def test_flatten(self):
        flat = ExportUtils.flatten({"a": 1, "b": {"c": 2, "d": {"e": 3}}, "f": [0.1, 0.2]})
        assert flat == {"a": 1, "b.c": 2, "b.d.e": 3, "f": "0.1, 0.2"}

    def test_write_trials(self, temp_directory):
        df = pd.DataFrame({"trial": [0, 1, 2], "win": [True, False, True], "secret_c": [1, 0, 1]})
        path = Path(temp_directory) / "sub" / "essais.xlsx"
        ok, error = ExportUtils.write_trials_to_excel(df, str(path), summary={"wins": 2, "tallies": {"a": 1}})
        assert ok, error

        wb = load_workbook(path)
        assert wb.sheetnames == [TRIALS_SHEET, SUMMARY_SHEET]
        ws = wb[TRIALS_SHEET]
        assert [c.value for c in ws[1]] == ["trial", "win", "secret_c"]
        assert ws.cell(row=2, column=2).value is True
        assert ws.freeze_panes == "A2"
        fill = ws.cell(row=2, column=2).fill.start_color.rgb
        assert fill.endswith(ExportConfig().win_color.lstrip("#").upper())

        summary = wb[SUMMARY_SHEET]
        fields = [summary.cell(row=r, column=1).value for r in range(2, summary.max_row + 1)]
        assert fields == ["wins", "tallies.a"]
        wb.close()

    def test_without_summary(self, temp_directory):
        path = Path(temp_directory) / "seul.xlsx"
        ok, _ = ExportUtils.write_trials_to_excel(pd.DataFrame({"trial": [0]}), str(path))
        assert ok
        wb = load_workbook(path)
        assert wb.sheetnames == [TRIALS_SHEET]
        wb.close()

    def test_failure_reported(self, temp_directory):
        ok, error = ExportUtils.write_trials_to_excel(pd.DataFrame({"trial": [0]}), temp_directory)
        assert not ok
        assert error


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
