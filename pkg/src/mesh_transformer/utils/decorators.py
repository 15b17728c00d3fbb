import json
import logging
import sys
from collections.abc import Callable
from functools import wraps
from typing import Any, TypeVar

from pydantic import ValidationError

from mesh_transformer.exceptions import ConfigurationError, MeshTransformerError

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


def _emit_error(document: dict[str, Any]) -> None:
    sys.stderr.write(json.dumps(document) + "\n")
    sys.stderr.flush()


def handle_cli_errors(command_name: str = "command") -> Callable[[F], F]:
    """
    Decorator mapping library exceptions to CLI exit codes.

    Configuration and schema errors exit with code 2, every other failure with
    code 1. In both cases a JSON error document is written to stderr.

    Args:
        command_name: Name of the subcommand for error logging.
    """

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            try:
                return func(*args, **kwargs)
            except ConfigurationError as e:
                logger.error(f"Invalid configuration for {command_name}: {e}")
                _emit_error({**e.to_dict(), "command": command_name})
                raise SystemExit(EXIT_USAGE_ERROR) from e
            except ValidationError as e:
                logger.error(f"Invalid configuration for {command_name}: {e}")
                _emit_error(
                    {
                        "error": "ConfigurationError",
                        "message": str(e),
                        "command": command_name,
                    }
                )
                raise SystemExit(EXIT_USAGE_ERROR) from e
            except MeshTransformerError as e:
                logger.error(f"{command_name} failed: {e}")
                logger.debug(f"Full exception details for {command_name}:", exc_info=True)
                _emit_error({**e.to_dict(), "command": command_name})
                raise SystemExit(EXIT_RUNTIME_ERROR) from e
            except (OSError, ValueError) as e:
                logger.error(f"{command_name} failed: {e}")
                logger.debug(f"Full exception details for {command_name}:", exc_info=True)
                _emit_error(
                    {"error": type(e).__name__, "message": str(e), "command": command_name}
                )
                raise SystemExit(EXIT_RUNTIME_ERROR) from e

        return wrapper  # type: ignore[return-value]

    return decorator
