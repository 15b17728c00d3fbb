"""Environment variable utility functions for mesh-transformer."""

import os


def is_env_truthy(env_var_name: str, default: str = "") -> bool:
    """Check if environment variable is set to a standard truthy value.

    Considers 'true', '1', 'yes' as truthy values (case-insensitive).

    Args:
        env_var_name: Name of the environment variable to check
        default: Default value if environment variable is not set

    Returns:
        True if the environment variable is set to a truthy value, False otherwise
    """
    return os.getenv(env_var_name, default).lower() in ("true", "1", "yes")


def get_env_int(env_var_name: str, default: int) -> int:
    """Read a positive integer from the environment.

    Non-numeric or non-positive values fall back to the default.

    Args:
        env_var_name: Name of the environment variable to read
        default: Value used when the variable is unset or invalid

    Returns:
        The parsed integer or the default
    """
    raw = os.getenv(env_var_name, "").strip()
    if not raw.isdigit() or int(raw) <= 0:
        return default
    return int(raw)


def get_env_choice(env_var_name: str, choices: tuple[str, ...], default: str) -> str:
    """Read an enumerated value from the environment (case-insensitive).

    Args:
        env_var_name: Name of the environment variable to read
        choices: Accepted lowercase values
        default: Value used when the variable is unset or not one of the choices

    Returns:
        The selected choice
    """
    raw = os.getenv(env_var_name, default).strip().lower()
    return raw if raw in choices else default
