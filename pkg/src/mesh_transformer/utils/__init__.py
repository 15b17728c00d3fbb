"""
Utility functions for mesh-transformer.
This package provides logging, environment, lifecycle and I/O helpers used
throughout the codebase.
"""

from .decorators import handle_cli_errors
from .env import get_env_choice, get_env_int, is_env_truthy
from .io import ensure_output_dir, read_json, write_json
from .lifecycle import (
    ensure_clean_exit,
    setup_signal_handlers,
    shutdown_requested,
)
from .logging import log_config_param, setup_logging

__all__ = [
    "ensure_clean_exit",
    "ensure_output_dir",
    "get_env_choice",
    "get_env_int",
    "handle_cli_errors",
    "is_env_truthy",
    "log_config_param",
    "read_json",
    "setup_logging",
    "setup_signal_handlers",
    "shutdown_requested",
    "write_json",
]
