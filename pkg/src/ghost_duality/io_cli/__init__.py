"""Configuration parsing and the command-line run modes."""

from .commands import SUMMARY_KEYS, cmd_eraser, cmd_pattern, cmd_sweep, cmd_validate, summarize
from .config import RunConfig, emit_config, parse_config
from .main import run

__all__ = [
    "SUMMARY_KEYS",
    "RunConfig",
    "cmd_eraser",
    "cmd_pattern",
    "cmd_sweep",
    "cmd_validate",
    "emit_config",
    "parse_config",
    "run",
    "summarize",
]
