"""
Logging setup

All rng_audit modules log through loggers under the ``rng_audit``
namespace. The level is applied once from ``AuditSettings.log_level``
(which reads RNG_AUDIT_LOG_LEVEL) and can be lowered from the command
line with ``-v``.
"""

import logging
import sys


ROOT_LOGGER_NAME = "rng_audit"
DEFAULT_LEVEL = logging.ERROR


def _setup_root_logger() -> logging.Logger:
    """Set up the package root logger"""
    logger = logging.getLogger(ROOT_LOGGER_NAME)

    # Only add handler (and the default level) if none exists
    if not logger.handlers:
        logger.setLevel(DEFAULT_LEVEL)
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger below the package root logger

    Args:
        name: Module name, usually ``__name__``

    Returns:
        logging.Logger: Logger sharing the package handler
    """
    _setup_root_logger()
    if name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def configure(log_level: str, verbosity: int = 0) -> int:
    """
    Apply a level name to the package root logger

    ``-v`` lowers the level to at most INFO and ``-vv`` to DEBUG; a
    verbosity never raises a level the configuration already made lower.

    Args:
        log_level: Level name such as ``"ERROR"`` or ``"DEBUG"``
        verbosity: Count of ``-v`` flags

    Returns:
        int: The effective numeric level
    """
    level = getattr(logging, log_level.upper(), DEFAULT_LEVEL)
    if verbosity == 1:
        level = min(level, logging.INFO)
    elif verbosity >= 2:
        level = min(level, logging.DEBUG)
    _setup_root_logger().setLevel(level)
    return level

