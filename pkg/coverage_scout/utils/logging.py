"""Logging utilities for coverage-scout.

This module provides a centralized logging configuration for the entire project.
All components should use get_logger(__name__) instead of print() statements.
Records go to stderr so that CSV files and summaries on stdout stay clean.
"""

import logging
import os
import sys

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_LEVEL_ENV = "COVERAGE_SCOUT_LOG_LEVEL"

_loggers: dict[str, logging.Logger] = {}
_file_handlers: list[logging.Handler] = []
_level_override: int | None = None


def _resolve_level(level: int | None) -> int:
    if level is not None:
        return level
    if _level_override is not None:
        return _level_override
    env_level = os.getenv(LOG_LEVEL_ENV, "INFO").upper()
    return getattr(logging, env_level, logging.INFO)


def get_logger(name: str, level: int | None = None) -> logging.Logger:
    """
    Get a configured logger for coverage-scout.

    Loggers are cached to avoid attaching duplicate handlers.

    Args:
        name: Logger name (typically __name__ from calling module)
        level: Optional logging level override. If not specified, uses the last
               set_log_level() value, then COVERAGE_SCOUT_LOG_LEVEL, then INFO

    Returns:
        Configured logger instance

    Example:
        >>> from coverage_scout.utils.logging import get_logger
        >>> logger = get_logger(__name__)
        >>> logger.info("Generating corpus")
    """
    if name in _loggers:
        return _loggers[name]

    logger = logging.getLogger(name)
    resolved = _resolve_level(level)
    logger.setLevel(resolved)

    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(resolved)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(console_handler)
        for handler in _file_handlers:
            logger.addHandler(handler)

    # Prevent propagation to root logger
    logger.propagate = False

    _loggers[name] = logger
    return logger


def set_log_level(level: str) -> None:
    """
    Set log level for all coverage-scout loggers, including ones created later.

    Args:
        level: Log level as string (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    global _level_override

    numeric_level = getattr(logging, level.upper(), logging.INFO)
    _level_override = numeric_level

    for logger in _loggers.values():
        logger.setLevel(numeric_level)
        for handler in logger.handlers:
            handler.setLevel(numeric_level)


def disable_logging() -> None:
    """
    Disable all coverage-scout logging output.

    Useful for testing or when running in quiet mode.
    """
    global _level_override

    _level_override = logging.CRITICAL + 1
    for logger in _loggers.values():
        logger.setLevel(logging.CRITICAL + 1)


def enable_file_logging(file_path: str, level: int | None = None) -> None:
    """
    Enable logging to file in addition to the console.

    Loggers created afterwards write to the file too.

    Args:
        file_path: Path to log file
        level: Optional log level for file handler
    """
    file_handler = logging.FileHandler(file_path)
    file_handler.setLevel(_resolve_level(level))
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))

    _file_handlers.append(file_handler)
    for logger in _loggers.values():
        logger.addHandler(file_handler)
