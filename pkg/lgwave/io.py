"""Run storage and the file formats written into it.

CSV files carry a header row, 17 significant digits and LF endings so that
identical runs give identical bytes. SVG images are plain SVG 1.1 polylines
on an 800x500 canvas.
"""

from __future__ import annotations

import contextlib
import math
from pathlib import Path
from typing import IO, Any, Iterator, Mapping, Optional, Sequence, Union

import numpy as np
import toml

from lgwave.log import logger

PATH_LIKE = Union[str, Path]

SVG_WIDTH = 800
SVG_HEIGHT = 500
SVG_MARGIN = 60
SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class LocalStorage:
    """A directory holding one sub-directory per run key."""

    def __init__(self, storage_path: PATH_LIKE):
        self._storage_path = Path(storage_path)

    @property
    def storage_path(self) -> Path:
        return self._storage_path

    def __truediv__(self, key: PATH_LIKE) -> Path:
        """Shortcut for ``storage.storage_path / key``."""
        return self.storage_path / key

    @contextlib.contextmanager
    def open(self, key: PATH_LIKE, mode: str = "r") -> Iterator[IO]:
        """Opens the file. Creates any missing directories."""
        path = self / key
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, mode, newline="" if "b" not in mode else None) as f:
            yield f

    def ls(
        self, key: PATH_LIKE = "", recursive: bool = False
    ) -> Iterator[Path]:
        root = self / key
        if not root.exists():
            return
        paths = root.rglob("*") if recursive else root.iterdir()
        for path in sorted(paths):
            yield path.relative_to(self.storage_path)

    def runs(self) -> list[str]:
        """Keys of the runs that wrote a summary."""
        return sorted(
            str(path.parent)
            for path in self.ls(recursive=True)
            if path.name == "summary.toml"
        )


# ---------------------------------------------------------------------------
# csv


def write_csv(
    path: PATH_LIKE,
    columns: Mapping[str, Sequence[float]],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", newline="") as f:
        np.savetxt(
            f,
            data,
            fmt="%.17g",
            delimiter=",",
            header=",".join(names),
            comments="",
            newline="\n",
        )
    logger.debug(f"Wrote {path}", rows=len(data), columns=names)
    return path


# ---------------------------------------------------------------------------
# svg


def _finite_range(arrays: Sequence[np.ndarray]) -> tuple[float, float]:
    finite = [a[np.isfinite(a)] for a in arrays]
    values = np.concatenate(finite or [np.zeros(0)])
    if len(values) == 0:
        return 0.0, 1.0
    low, high = float(values.min()), float(values.max())
    if high - low < 1e-12:
        low, high = low - 0.5, high + 0.5
    return low, high


def _polyline(
    x: np.ndarray,
    y: np.ndarray,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    color: str,
) -> str:
    inner_w = SVG_WIDTH - 2 * SVG_MARGIN
    inner_h = SVG_HEIGHT - 2 * SVG_MARGIN
    mask = np.isfinite(x) & np.isfinite(y)
    px = SVG_MARGIN + (x[mask] - x_range[0]) / (
        x_range[1] - x_range[0]
    ) * inner_w
    py = (
        SVG_HEIGHT
        - SVG_MARGIN
        - (y[mask] - y_range[0]) / (y_range[1] - y_range[0]) * inner_h
    )
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
        f'points="{points}"/>'
    )


def _thin(n: int, max_points: int = 2000) -> np.ndarray:
    return np.unique(np.linspace(0, n - 1, min(n, max_points)).astype(int))


def render_svg(
    title: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    x_label: str = "z",
    y_range: Optional[tuple[float, float]] = None,
) -> str:
    x_arr = np.asarray(x, dtype=float)
    idx = _thin(len(x_arr))
    ys = {name: np.asarray(y, dtype=float)[idx] for name, y in series.items()}
    x_arr = x_arr[idx]
    x_range = _finite_range([x_arr])
    if y_range is None:
        y_range = _finite_range(list(ys.values()))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<text x="{SVG_WIDTH / 2:.0f}" y="30" text-anchor="middle" '
        f'font-size="16">{title}</text>',
        f'<rect x="{SVG_MARGIN}" y="{SVG_MARGIN}" '
        f'width="{SVG_WIDTH - 2 * SVG_MARGIN}" '
        f'height="{SVG_HEIGHT - 2 * SVG_MARGIN}" '
        'fill="none" stroke="black"/>',
        f'<text x="{SVG_MARGIN}" y="{SVG_HEIGHT - 35}" font-size="12">'
        f"{x_range[0]:.4g}</text>",
        f'<text x="{SVG_WIDTH - SVG_MARGIN}" y="{SVG_HEIGHT - 35}" '
        f'text-anchor="end" font-size="12">{x_range[1]:.4g}</text>',
        f'<text x="{SVG_WIDTH / 2:.0f}" y="{SVG_HEIGHT - 20}" '
        f'text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="{SVG_MARGIN - 5}" y="{SVG_HEIGHT - SVG_MARGIN}" '
        f'text-anchor="end" font-size="12">{y_range[0]:.4g}</text>',
        f'<text x="{SVG_MARGIN - 5}" y="{SVG_MARGIN + 10}" '
        f'text-anchor="end" font-size="12">{y_range[1]:.4g}</text>',
    ]
    for i, (name, y) in enumerate(ys.items()):
        color = SVG_COLORS[i % len(SVG_COLORS)]
        lines.append(_polyline(x_arr, y, x_range, y_range, color))
        lines.append(
            f'<text x="{SVG_WIDTH - SVG_MARGIN - 10}" '
            f'y="{SVG_MARGIN + 20 + 16 * i}" text-anchor="end" '
            f'font-size="12" fill="{color}">{name}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(
    path: PATH_LIKE,
    title: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    x_label: str = "z",
    y_range: Optional[tuple[float, float]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(render_svg(title, x, series, x_label, y_range))
    logger.debug(f"Wrote {path}")
    return path


# ---------------------------------------------------------------------------
# summary


def _plain(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # toml has no representation for these
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return str(value)


def flatten(values: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(flatten(value, prefix=f"{name}."))
        elif value is not None:
            flat[name] = _plain(value)
    return flat


def write_summary(path: PATH_LIKE, summary: Mapping[str, Any]) -> Path:
    """Writes a flat ``key = value`` file; nested keys are joined by dots."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        toml.dump(flatten(summary), f)
    return path


def read_summary(path: PATH_LIKE) -> dict[str, Any]:
    return toml.load(path)


def format_table(rows: Mapping[str, Any], title: Optional[str] = None) -> str:
    flat = flatten(rows)
    if not flat:
        return title or ""
    width = max(len(key) for key in flat)
    lines = [title] if title else []
    for key, value in flat.items():
        if isinstance(value, float):
            text = f"{value:.10g}"
        else:
            text = str(value)
        lines.append(f"{key:<{width}}  {text}")
    return "\n".join(lines)
