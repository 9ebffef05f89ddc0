"""Package logging for noether-verify.

Every module logs through ``get_logger("<subpackage>.<module>")``, a child of
the ``noether_verify`` logger, so the CLI configures all of them with one
``configure_logging`` call. Console output goes to stderr: stdout carries
reports and JSON documents.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Optional

ROOT_LOGGER = "noether_verify"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_loggers: dict[str, logging.Logger] = {}


def resolve_level(level: int | str | None, default: int = logging.WARNING) -> int:
    """Numeric level for a config value such as ``"info"`` or ``20``.

    Raises:
        ValueError: Unknown level name
    """
    if level is None or level == "":
        return default
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    if not isinstance(value, int):
        raise ValueError(f"Unknown log level: '{level}'. Use DEBUG, INFO, WARNING or ERROR")
    return value


def _handler(handler: logging.Handler, level: int) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    return handler


def setup_logger(
    name: str = ROOT_LOGGER,
    log_file: str | Path | None = None,
    level: int = logging.WARNING,
    console: bool = True,
) -> logging.Logger:
    """Set up and configure a logger, replacing its handlers.

    Args:
        name: Logger name
        log_file: Path to log file (optional, parent directories are created)
        level: Logging level
        console: Whether to also log to stderr

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    for old in list(logger.handlers):
        old.close()
    logger.handlers.clear()

    if console:
        logger.addHandler(_handler(logging.StreamHandler(sys.stderr), level))
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        logger.addHandler(_handler(logging.FileHandler(log_path), level))

    _loggers[name] = logger
    return logger


def configure_logging(
    section: Optional[Mapping[str, Any]] = None,
    verbose: bool = False,
    debug: bool = False,
) -> logging.Logger:
    """Configure the package logger from the ``logging`` config section.

    ``debug`` wins over ``verbose``, which wins over the configured level.
    An unknown configured level falls back to WARNING.
    """
    section = section or {}
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        try:
            level = resolve_level(section.get("level"))
        except ValueError:
            level = logging.WARNING
    return setup_logger(ROOT_LOGGER, log_file=section.get("file"), level=level, console=True)


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Logger for a module, below the package root.

    Args:
        name: Logger name relative to the package root, e.g. "runner.verifier"

    Returns:
        Logger instance (not configured; it propagates to the root)
    """
    if name in _loggers:
        return _loggers[name]
    full_name = name if name.startswith(ROOT_LOGGER) else f"{ROOT_LOGGER}.{name}"
    logger = logging.getLogger(full_name)
    _loggers[name] = logger
    return logger
