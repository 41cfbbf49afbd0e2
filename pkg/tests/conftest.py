from pathlib import Path

import numpy as np
import pytest

from lgwave import io, waveode
from lgwave.model import ModelSpec, builtin_model


def fig1_model() -> ModelSpec:
    return builtin_model("holling2", a=1.4, e1=2.0, mu=1.2, d=1.0, s=0.5)


def fig2_model() -> ModelSpec:
    return builtin_model("holling2", a=0.7, e1=1.2, mu=1.4, d=1.0, s=0.5)


def fig3_model() -> ModelSpec:
    return builtin_model("holling2", a=15.0, e1=1.2, mu=0.5, d=1.0, s=0.5)


def fig5_model() -> ModelSpec:
    return builtin_model("lv", a=4.5, mu=0.1, d=1.0, s=0.5)


def read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path) as f:
        names = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(names)}


@pytest.fixture
def holling() -> ModelSpec:
    return fig1_model()


@pytest.fixture
def lv() -> ModelSpec:
    return fig5_model()


@pytest.fixture
def storage(tmp_path: Path) -> io.LocalStorage:
    return io.LocalStorage(tmp_path / "data_storage")


@pytest.fixture
def output_env(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    out = tmp_path / "lgwave_output"
    monkeypatch.setenv("LGWAVE_OUTPUT_DIR", str(out))
    return out


# shooting is the expensive part of most tests; share the profiles


@pytest.fixture(scope="session")
def fig1_profile() -> waveode.Profile:
    return waveode.shoot(fig1_model(), 1.5)


@pytest.fixture(scope="session")
def fig1_profile_c2() -> waveode.Profile:
    return waveode.shoot(fig1_model(), 2.0)


@pytest.fixture(scope="session")
def fig2_profile() -> waveode.Profile:
    return waveode.shoot(fig2_model(), 1.5)


@pytest.fixture(scope="session")
def fig3_profile() -> waveode.Profile:
    return waveode.shoot(fig3_model(), 1.5)


@pytest.fixture(scope="session")
def fig5_profile() -> waveode.Profile:
    return waveode.shoot(fig5_model(), 1.5)
