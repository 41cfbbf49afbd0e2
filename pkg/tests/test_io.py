from pathlib import Path

import numpy as np
import pytest

from lgwave import io
from lgwave.utils import short_number

from .conftest import read_csv


def test_storage_layout(storage: io.LocalStorage):
    with storage.open("run_a/summary.toml", "w") as f:
        f.write('passed = true\n')
    with storage.open("run_a/profile.csv", "w") as f:
        f.write("z\n0\n")
    with storage.open("run_b/config.ini", "w") as f:
        f.write("[model]\n")

    assert storage / "run_a" == storage.storage_path / "run_a"
    assert list(storage.ls()) == [Path("run_a"), Path("run_b")]
    assert Path("run_a/profile.csv") in list(storage.ls("run_a"))
    assert storage.runs() == ["run_a"]
    assert list(storage.ls("missing")) == []


def test_csv(tmp_path: Path):
    z = np.linspace(-1.0, 1.0, 5)
    path = io.write_csv(tmp_path / "out" / "profile.csv", {"z": z, "u": z**2})
    text = path.read_bytes()
    assert text.startswith(b"z,u\n")
    assert b"\r" not in text
    assert len(text.splitlines()) == 6

    loaded = read_csv(path)
    assert list(loaded) == ["z", "u"]
    # 17 significant digits restore every double exactly
    assert np.array_equal(loaded["u"], z**2)


def test_csv_is_deterministic(tmp_path: Path):
    values = {
        "x": np.array([0.1, 1 / 3, 2e-300]),
        "v": np.array([1.0, 0.0, -0.5]),
    }
    a = io.write_csv(tmp_path / "a.csv", values).read_bytes()
    b = io.write_csv(tmp_path / "b.csv", values).read_bytes()
    assert a == b


def test_svg(tmp_path: Path):
    x = np.linspace(0.0, 10.0, 5000)
    path = io.write_svg(
        tmp_path / "plot.svg",
        "t=10",
        x,
        {"u": np.sin(x), "v": np.cos(x)},
        x_label="x",
        y_range=(-1.0, 1.0),
    )
    text = path.read_text()
    assert text.startswith('<?xml version="1.0"')
    assert 'width="800" height="500"' in text
    assert text.count("<polyline") == 2
    assert ">t=10<" in text
    points = text.split('points="')[1].split('"')[0].split()
    assert len(points) <= 2000


def test_svg_flat_series():
    text = io.render_svg("flat", [0.0, 1.0], {"u": [1.0, 1.0]})
    assert "nan" not in text


def test_summary(tmp_path: Path):
    summary = {
        "passed": np.bool_(True),
        "c": np.float64(1.5),
        "n_points": np.int64(10),
        "equilibrium": {"coexistence": (0.1, 0.2), "missing": None},
        "bad": float("nan"),
        "kind": "holling2",
    }
    path = io.write_summary(tmp_path / "summary.toml", summary)
    loaded = io.read_summary(path)
    assert loaded["passed"] is True
    assert loaded["c"] == 1.5
    assert loaded["n_points"] == 10
    assert loaded["equilibrium.coexistence"] == [0.1, 0.2]
    assert "equilibrium.missing" not in loaded
    assert loaded["bad"] == "nan"


def test_format_table():
    rows = {"u_star": 0.12662, "abar": {"holling": 1.4373}}
    table = io.format_table(rows, "t")
    lines = table.splitlines()
    assert lines[0] == "t"
    assert lines[1].split() == ["u_star", "0.12662"]
    assert lines[2].split() == ["abar.holling", "1.4373"]
    assert io.format_table({}) == ""


@pytest.mark.parametrize("value,expected", [(1.5, "1.5"), (1e20, "1e20")])
def test_short_number(value, expected):
    assert short_number(value) == expected
