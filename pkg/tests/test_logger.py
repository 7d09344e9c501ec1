"""
Tests unitaires pour le système de logging
"""

import pytest
import sys
import threading
from datetime import datetime
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.logger import Logger, LogLevel, LogEntry, get_logger, set_logger


class TestLogLevel:
    """Tests pour LogLevel"""

    def test_log_level_values(self):
        """Test valeurs des niveaux"""
        assert LogLevel.DEBUG.name_str == "DEBUG"
        assert LogLevel.INFO.name_str == "INFO"
        assert LogLevel.ERROR.name_str == "ERROR"

    def test_from_name(self):
        """Nom insensible à la casse, INFO par défaut"""
        assert LogLevel.from_name("warning") == LogLevel.WARNING
        assert LogLevel.from_name("inconnu") == LogLevel.INFO


class TestLogEntry:
    """Tests pour LogEntry"""

    def test_format_entry(self):
        """Test formatage entrée"""
        entry = LogEntry(
            timestamp=datetime.now(),
            level=LogLevel.WARNING,
            message="Violation de protocole",
            source="harness"
        )
        formatted = entry.format()

        assert "[WARNING]" in formatted
        assert "[harness]" in formatted
        assert "Violation de protocole" in formatted

    def test_format_without_timestamp(self):
        entry = LogEntry(timestamp=datetime.now(), level=LogLevel.INFO, message="Test")
        assert "[INFO]" in entry.format(include_timestamp=False)


class TestLogger:
    """Tests pour Logger"""

    @pytest.fixture
    def logger(self, tmp_path):
        return Logger(log_dir=tmp_path, level=LogLevel.DEBUG, console=False)

    def test_create_logger(self, logger):
        assert logger.name == "UnclonableLab"
        assert logger.log_file is None

    def test_log_info(self, logger):
        logger.info("Jeu cue: 1000 essais", source="harness")

        assert len(logger.entries) == 1
        assert logger.entries[0].level == LogLevel.INFO
        assert logger.entries[0].source == "harness"

    def test_level_threshold(self, tmp_path):
        """Les entrées sous le seuil sont ignorées"""
        logger = Logger(log_dir=tmp_path, level=LogLevel.WARNING, console=False)
        logger.debug("ignoré")
        logger.info("ignoré")
        logger.warning("conservé")

        assert [e.message for e in logger.entries] == ["conservé"]

    def test_counters(self, logger):
        logger.error("e1")
        logger.critical("e2")
        logger.warning("w1")

        assert logger.error_count == 2
        assert logger.warning_count == 1
        assert len(logger.get_errors()) == 2
        assert len(logger.get_warnings()) == 1

    def test_max_entries_limit(self, tmp_path):
        logger = Logger(log_dir=tmp_path, max_entries=10, console=False)
        for i in range(25):
            logger.info(f"Message {i}")

        assert len(logger.entries) == 10
        assert logger.entries[-1].message == "Message 24"

    def test_thread_safe_logging(self, logger):
        """Les workers d'essais journalisent en parallèle"""
        def work():
            for i in range(100):
                logger.info(f"essai {i}", source="harness")

        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert len(logger.entries) == 400

    def test_log_file_created(self, tmp_path):
        logger = Logger(log_dir=tmp_path, to_file=True, console=False)
        logger.info("Test file creation")
        assert logger.log_file.exists()

    def test_save_error_report(self, logger):
        logger.error("Test error")
        report_path = logger.save_error_report(stats={"essais": 10})
        assert report_path == logger.error_file
        content = report_path.read_text(encoding="utf-8")
        assert "Test error" in content
        assert "essais: 10" in content

    def test_save_error_report_to_path(self, logger, tmp_path):
        logger.warning("Avertissement")
        target = tmp_path / "rapports" / "erreurs.txt"
        assert logger.save_error_report(target) == target
        assert "AVERTISSEMENTS (1)" in target.read_text(encoding="utf-8")

    def test_save_error_report_empty(self, logger):
        logger.info("Only info")
        assert logger.save_error_report() is None


class TestGlobalLogger:
    """Tests pour le logger global"""

    def test_set_logger(self, tmp_path):
        custom_logger = Logger(log_dir=tmp_path, console=False)
        set_logger(custom_logger)
        assert get_logger() is custom_logger


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
