"""Command-line subcommands."""

from .commands import COMMANDS, pretrain_configs

__all__ = ["COMMANDS", "pretrain_configs"]
