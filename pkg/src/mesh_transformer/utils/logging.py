"""Logging utilities for mesh-transformer.

This module configures the root logger with a single stream handler and a
uniform format, and provides a helper to log resolved configuration values.
"""

import logging
import sys
from typing import Any, TextIO

APP_LOGGER_NAME = "mesh-transformer"


def setup_logging(
    level: int = logging.WARNING, stream: TextIO = sys.stderr
) -> logging.Logger:
    """
    Configure mesh-transformer logging.

    Args:
        level: The minimum logging level to display (default: WARNING)
        stream: The stream to write logs to (default: sys.stderr)

    Returns:
        The configured application logger
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    # Remove existing handlers to prevent duplication
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler = logging.StreamHandler(stream)
    formatter = logging.Formatter("%(levelname)s - %(name)s - %(message)s")
    handler.setFormatter(formatter)
    root_logger.addHandler(handler)

    logger = logging.getLogger(APP_LOGGER_NAME)
    logger.setLevel(level)
    return logger


def resolve_log_level(verbose: int, very_verbose: bool, verbose_env: bool) -> int:
    """Resolve the logging level from the CLI verbosity count and environment.

    Args:
        verbose: Number of ``-v`` flags given on the command line
        very_verbose: Whether MESH_VERY_VERBOSE is set
        verbose_env: Whether MESH_VERBOSE is set

    Returns:
        A logging level constant
    """
    if verbose == 1:
        return logging.INFO
    if verbose >= 2:
        return logging.DEBUG
    if very_verbose:
        return logging.DEBUG
    if verbose_env:
        return logging.INFO
    return logging.WARNING


def log_config_param(
    logger: logging.Logger,
    section: str,
    param: str,
    value: Any,
) -> None:
    """Logs a resolved configuration parameter.

    Args:
        logger: The logger to use
        section: The configuration section (model, train, augment, ...)
        param: The parameter name
        value: The parameter value
    """
    display_value = "Not Provided" if value is None else value
    logger.info(f"{section} {param}: {display_value}")
