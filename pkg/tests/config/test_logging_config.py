"""Tests for the logging setup."""

import logging

import pytest
from rich.logging import RichHandler

from src.config.logging_config import configure_logging


@pytest.fixture
def root_logger():
    """Root logger restored to its handlers and level after the test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield root
    root.handlers[:] = handlers
    root.setLevel(level)


class TestConfigureLogging:
    """Test suite for configure_logging."""

    def test_should_install_rich_handler(self, root_logger):
        """A RichHandler is attached and the level applied."""
        configure_logging(logging.DEBUG)

        assert any(isinstance(h, RichHandler) for h in root_logger.handlers)
        assert root_logger.level == logging.DEBUG

    def test_should_replace_handler_on_reconfigure(self, root_logger):
        """Calling twice leaves exactly one RichHandler."""
        configure_logging("INFO")
        configure_logging("WARNING")

        assert sum(isinstance(h, RichHandler) for h in root_logger.handlers) == 1
        assert root_logger.level == logging.WARNING
