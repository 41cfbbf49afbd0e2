from __future__ import annotations

import importlib
import os
from pathlib import Path
from typing import Optional, Union

from lgwave.log import logger

OUTPUT_DIR_VARIABLE = "LGWAVE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "lgwave_output"

_project_dir: Optional[Path] = None


def output_root(directory: Union[str, Path, None] = None) -> Path:
    """The directory runs are stored in.

    An explicit directory wins over ``LGWAVE_OUTPUT_DIR``, which wins over
    ``./lgwave_output``.
    """
    if directory is None:
        directory = os.environ.get(OUTPUT_DIR_VARIABLE, DEFAULT_OUTPUT_DIR)
    return Path(directory).expanduser()


def infer_project_dir(package: str = "lgwave") -> Optional[Path]:
    """The source checkout of ``package``, if it is installed from one."""
    global _project_dir
    if _project_dir is not None:
        return _project_dir

    module = importlib.import_module(package)
    assert module.__file__ is not None
    project_dir = Path(module.__file__).parent.parent.resolve()
    if not (project_dir / "pyproject.toml").exists():
        logger.debug(
            f"{project_dir} does not look like a source checkout",
            project_dir=project_dir,
        )
        return None
    _project_dir = project_dir
    logger.debug(f"Using {project_dir} as project dir", project_dir=project_dir)
    return project_dir
