"""Configuration and logging."""

from .config import Config
from .logger import configure_logging, get_logger, setup_logger

__all__ = ["Config", "configure_logging", "get_logger", "setup_logger"]
