"""util functions."""

from __future__ import annotations

import contextlib
import pdb
import sys
import traceback
from typing import Iterator


@contextlib.contextmanager
def pdb_post_mortem(enable: bool = True) -> Iterator[None]:
    if enable:
        try:
            yield
        except Exception:
            _, _, tb = sys.exc_info()
            traceback.print_exc()
            pdb.post_mortem(tb)
            raise
    else:
        yield


def short_number(value: float) -> str:
    """Compact text for a parameter inside a file or directory name."""
    return f"{value:.6g}".replace("+", "")
