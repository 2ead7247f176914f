"""
Logging setup shared by the CLI and the HTTP service.
"""

import logging
from typing import Optional

from pythonjsonlogger.json import JsonFormatter

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FIELDS = "%(asctime)s %(name)s %(levelname)s %(message)s"


def configure_logging(level: str = "INFO", log_file: Optional[str] = None, json_format: bool = False) -> None:
    """Install stream (and optional file) handlers on the root logger."""
    if json_format:
        formatter: logging.Formatter = JsonFormatter(JSON_FIELDS)
    else:
        formatter = logging.Formatter(TEXT_FORMAT)

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    for handler in handlers:
        handler.setFormatter(formatter)

    logging.basicConfig(level=level.upper(), handlers=handlers, force=True)
