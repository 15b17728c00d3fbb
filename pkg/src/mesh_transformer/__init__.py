import logging
import sys
from importlib.metadata import PackageNotFoundError, version

import click
from dotenv import load_dotenv

from mesh_transformer.utils.env import is_env_truthy
from mesh_transformer.utils.lifecycle import ensure_clean_exit, setup_signal_handlers
from mesh_transformer.utils.logging import resolve_log_level, setup_logging

try:
    __version__ = version("mesh-transformer")
except PackageNotFoundError:
    # package is not installed
    __version__ = "0.0.0"

# Initialize logging with appropriate level
logging_level = logging.WARNING
if is_env_truthy("MESH_VERBOSE"):
    logging_level = logging.DEBUG

# Set up logging to STDOUT if MESH_LOGGING_STDOUT is set to true
logging_stream = sys.stdout if is_env_truthy("MESH_LOGGING_STDOUT") else sys.stderr

logger = setup_logging(logging_level, logging_stream)


@click.version_option(__version__, prog_name="mesh-transformer")
@click.group()
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Increase verbosity (can be used multiple times)",
)
@click.option(
    "--env-file", type=click.Path(exists=True, dir_okay=False), help="Path to .env file"
)
def main(verbose: int, env_file: str | None) -> None:
    """Mesh Transformer - masked graph transformers for mesh-based physics

    Generates synthetic heat-diffusion data, trains and pretrains models,
    rolls them out, evaluates them, and runs isoFLOP scaling sweeps.
    """
    if env_file:
        load_dotenv(env_file, override=True)
    else:
        load_dotenv(override=True)

    current_logging_level = resolve_log_level(
        verbose,
        is_env_truthy("MESH_VERY_VERBOSE", "false"),
        is_env_truthy("MESH_VERBOSE", "false"),
    )
    logging_stream = sys.stdout if is_env_truthy("MESH_LOGGING_STDOUT") else sys.stderr

    global logger
    logger = setup_logging(current_logging_level, logging_stream)
    logger.debug(f"Logging level set to: {logging.getLevelName(current_logging_level)}")
    if env_file:
        logger.debug(f"Loaded environment from file: {env_file}")

    setup_signal_handlers()
    click.get_current_context().call_on_close(ensure_clean_exit)


from mesh_transformer.cli import COMMANDS  # noqa: E402

for _command in COMMANDS:
    main.add_command(_command)

__all__ = ["main", "__version__"]

if __name__ == "__main__":
    main()
