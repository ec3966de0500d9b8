"""
Tests for logging utilities.
"""

import json
import logging
from fractions import Fraction
from unittest.mock import Mock, patch

import numpy as np

from pentropy_lab.utils.logging import (
    ComponentLogger,
    LoggingManager,
    LogLevel,
    get_logger,
    get_logging_stats,
    setup_logging,
)


class TestComponentLogger:
    """Test cases for ComponentLogger."""

    def test_component_logger_initialization(self):
        """Test component logger initialization."""
        logger = ComponentLogger("refine", {"run": "a"})

        assert logger.component_name == "refine"
        assert logger.extra_context == {"run": "a"}
        assert logger.logger.name == "pentropy_lab.refine"

    def test_format_message(self):
        """Test message formatting."""
        logger = ComponentLogger("limits", {"context_key": "context_value"})

        formatted = logger._format_message("Test message", {"m": 5})

        assert formatted["component"] == "limits"
        assert formatted["message"] == "Test message"
        assert formatted["context_key"] == "context_value"
        assert formatted["m"] == 5
        assert "timestamp" in formatted

    def test_log_methods(self):
        """Test that each level reaches the underlying logger."""
        with patch("logging.getLogger") as mock_get_logger:
            mock_logger = Mock()
            mock_logger.isEnabledFor.return_value = True
            mock_get_logger.return_value = mock_logger

            logger = ComponentLogger("entropy")
            logger.debug("Debug message")
            logger.info("Info message")
            logger.warning("Warning message")
            logger.error("Error message", exc_info=True)

            levels = [call.args[0] for call in mock_logger.log.call_args_list]
            assert levels == [logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR]
            assert mock_logger.log.call_args_list[-1].kwargs["exc_info"] is True

    def test_disabled_level_skips_formatting(self):
        with patch("logging.getLogger") as mock_get_logger:
            mock_logger = Mock()
            mock_logger.isEnabledFor.return_value = False
            mock_get_logger.return_value = mock_logger

            ComponentLogger("entropy").debug("hidden")
            mock_logger.log.assert_not_called()

    def test_json_payload_handles_numeric_types(self, caplog):
        """Fractions and numpy scalars are serialized as numbers."""
        logger = ComponentLogger("refine")
        with caplog.at_level(logging.INFO, logger="pentropy_lab.refine"):
            logger.info("Join computed", {"width": Fraction(1, 4), "count": np.int64(3)})

        payload = json.loads(caplog.records[-1].getMessage())
        assert payload["width"] == 0.25
        assert payload["count"] == 3
        assert payload["message"] == "Join computed"


class TestLoggingManager:
    """Test cases for LoggingManager."""

    def test_console_only(self):
        manager = LoggingManager(log_level="DEBUG")
        root = logging.getLogger("pentropy_lab")

        assert manager.log_dir is None
        assert root.level == logging.DEBUG
        assert len(root.handlers) == 1

    def test_rotating_files(self, tmp_path):
        manager = LoggingManager(str(tmp_path / "logs"), "INFO")
        root = logging.getLogger("pentropy_lab")
        names = sorted(
            getattr(handler, "baseFilename", "").rsplit("/", 1)[-1] for handler in root.handlers
        )

        assert manager.log_dir.exists()
        assert names == ["", "errors.log", "pentropy_lab.log"]

    def test_component_logger_cache(self):
        manager = LoggingManager()
        a = manager.get_component_logger("limits")
        b = manager.get_component_logger("limits")
        c = manager.get_component_logger("limits", {"m": 1})

        assert a is b
        assert a is not c

    def test_log_stats_console_only(self):
        stats = LoggingManager(log_level="WARNING").get_log_stats()

        assert stats["log_directory"] is None
        assert stats["log_level"] == "WARNING"
        assert stats["handlers"] == ["StreamHandler"]
        assert stats["log_files"] == []

    def test_log_stats_lists_files(self, tmp_path):
        manager = LoggingManager(str(tmp_path / "logs"), "INFO")
        manager.get_component_logger("entropy").info("Row done", {"j": 1})
        stats = manager.get_log_stats()

        assert sorted(stats["handlers"]) == [
            "RotatingFileHandler",
            "RotatingFileHandler",
            "StreamHandler",
        ]
        assert [f["name"] for f in stats["log_files"]] == ["errors.log", "pentropy_lab.log"]
        sizes = {f["name"]: f["size_bytes"] for f in stats["log_files"]}
        assert sizes["pentropy_lab.log"] > 0
        assert sizes["errors.log"] == 0
        assert stats["component_loggers"] == 1


class TestGlobalLogging:
    """Test module-level helpers."""

    def test_setup_logging(self):
        manager = setup_logging(log_level="WARNING")
        assert isinstance(manager, LoggingManager)
        assert get_logger("config") is manager.get_component_logger("config")

    def test_logging_stats_before_and_after_setup(self):
        assert get_logging_stats() == {"error": "Logging not initialized"}
        setup_logging(log_level="ERROR")
        assert get_logging_stats()["log_level"] == "ERROR"

    def test_get_logger_without_setup(self):
        logger = get_logger("mcoracle")
        assert isinstance(logger, ComponentLogger)
        assert logger.logger.name == "pentropy_lab.mcoracle"

    def test_log_level_values(self):
        assert [level.value for level in LogLevel] == [
            "DEBUG",
            "INFO",
            "WARNING",
            "ERROR",
            "CRITICAL",
        ]
