"""Logging setup: one rich handler on stderr for the whole package."""

import logging

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(message)s"


def configure_logging(level: int | str = logging.INFO) -> None:
    """Install a RichHandler writing to stderr on the root logger.

    Calling it again replaces the handler, so the level can be changed
    after startup.

    Args:
        level: Logging level name or number
    """
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger()
    for existing in list(root.handlers):
        if isinstance(existing, RichHandler):
            root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)
