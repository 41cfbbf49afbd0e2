"""Logging of lgwave runs.

The console sink writes to stderr, stdout is reserved for the result tables.
A run additionally logs into ``output.log`` and ``output.jsonl`` inside its
output directory.
"""
import sys
import warnings
from pathlib import Path
from typing import Any, Optional

import loguru

logger = loguru.logger

LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")

FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan>"
    " - <level>{message}</level>"
    " - {extra}"
)


def _show_warning(
    message: Any,
    category: type[Warning],
    filename: str,
    lineno: int,
    file: Any = None,
    line: Optional[str] = None,
) -> None:
    logger.opt(depth=2).warning(
        f"{category.__name__}: {message}", source=f"{filename}:{lineno}"
    )


def setup_logger(
    output_dir: Optional[Path] = None,
    bind: Optional[dict[str, Any]] = None,
    stderr_level: str = "INFO",
    file_level: str = "DEBUG",
) -> None:
    """Replaces all sinks of the global logger.

    ``bind`` is attached as extra context to every record, e.g. the run key,
    including records of modules that imported ``logger`` earlier.
    Python warnings such as ``TruncationWarning`` are logged as well.
    """
    if stderr_level not in LEVELS:
        raise ValueError(f"unknown log level {stderr_level!r}")
    logger.remove()
    logger.configure(extra=dict(bind or {}))
    logger.add(sys.stderr, colorize=True, format=FORMAT, level=stderr_level)
    if output_dir is not None:
        logger.add(
            output_dir / "output.log",
            backtrace=True,
            diagnose=True,
            format=FORMAT,
            level=file_level,
        )
        logger.add(
            output_dir / "output.jsonl", serialize=True, level=file_level
        )
        logger.debug(f"Logging into {output_dir}")
    warnings.showwarning = _show_warning
