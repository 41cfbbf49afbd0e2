import numpy as np
import pytest

from lgwave import analysis
from lgwave.errors import DomainError, PreconditionError
from lgwave.model import (
    CustomKinetics,
    ModelKind,
    builtin_model,
    check_assumptions,
    custom_model,
    kinetics,
)

BUILTINS = [
    dict(kind="lv", a=4.5, mu=0.1),
    dict(kind="lv", a=15.0, mu=0.1),
    dict(kind="holling2", a=1.4, e1=2.0, mu=1.2),
    dict(kind="holling2", a=0.7, e1=1.2, mu=1.4),
    dict(kind="holling2", a=15.0, e1=1.2, mu=0.5),
    dict(kind="ivlev", a=2.0, m=1.5, mu=0.2),
]


def test_lotka_volterra_kinetics():
    model = builtin_model("lv", a=4.5, d=1.0, s=0.5, mu=0.1)
    assert model.kind is ModelKind.LOTKA_VOLTERRA
    assert float(model.f(0.5)) == pytest.approx(2.25)
    assert float(model.p(0.0)) == pytest.approx(1 / 4.5)
    assert float(model.g(0.3)) == pytest.approx(4.5)


def test_holling_q_at_one():
    model = builtin_model("holling2", a=1.4, e1=2.0, d=1.0, s=0.5, mu=1.2)
    assert model.q1 == pytest.approx(2.2)
    assert model.q0 == pytest.approx(1.2)
    assert float(model.g(1.0)) == pytest.approx(1.4 / 3.0)


def test_ivlev_removable_singularity():
    model = builtin_model("ivlev", a=2.0, m=1.5, mu=0.2)
    assert float(model.p(0.0)) == pytest.approx(1 / (2.0 * 1.5))
    # the series branch and the direct formula meet without a jump
    below = float(model.p(0.9e-6 / 1.5))
    above = float(model.p(1.1e-6 / 1.5))
    assert below == pytest.approx(above, rel=1e-6)
    assert float(model.p(1.0)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize(
    "kind,params",
    [
        ("holling2", dict(a=1.0, e1=0.5)),
        ("lv", dict(a=-1.0)),
        ("lv", dict(a=1.0, mu=0.0)),
        ("ivlev", dict(a=1.0, m=2.0)),
        ("nonsense", dict(a=1.0)),
    ],
)
def test_builtin_model_rejects(kind, params):
    with pytest.raises(DomainError):
        builtin_model(kind, **params)


def test_kind_aliases():
    assert ModelKind.parse("Lotka-Volterra") is ModelKind.LOTKA_VOLTERRA
    assert ModelKind.parse("holling") is ModelKind.HOLLING_II


@pytest.mark.parametrize("params", BUILTINS)
def test_builtin_models_satisfy_assumptions(params):
    params = dict(params)
    model = builtin_model(params.pop("kind"), **params)
    report = check_assumptions(model, 1.0, 10_000)
    assert report.ok, report.violations[:5]
    assert report.violations == []


def test_lv_assumptions_coarse_grid():
    report = check_assumptions(builtin_model("lv", a=0.3), 1.0, 10)
    assert report.h1_ok and report.h2_ok and report.h3_ok


def test_assumption_violation_is_recorded():
    a, e1 = 1.0, 0.5
    holling = CustomKinetics(
        f=lambda u: a * u / (u + e1),
        df=lambda u: a * e1 / (u + e1) ** 2,
        p=lambda u: (1 - u) * (u + e1) / a,
        dp=lambda u: (1 - e1 - 2 * u) / a,
        h=lambda u: np.ones_like(u),
        dh=lambda u: np.zeros_like(u),
    )
    model = custom_model(holling, mu=0.1)
    report = check_assumptions(model, 1.0, 1000)
    assert report.h1_ok
    assert not report.h2_ok
    assert report.h3_ok
    h2 = [u for tag, u, _ in report.violations if tag == "H2"]
    assert h2 and max(h2) < 0.3


def test_check_assumptions_preconditions(holling):
    with pytest.raises(PreconditionError):
        check_assumptions(holling, 0.5, 100)
    with pytest.raises(PreconditionError):
        check_assumptions(holling, 1.0, 1)


def test_kinetics_at_equilibria(holling, lv):
    du, dv = kinetics(lv, 0.1, 0.2)
    assert du == pytest.approx(0.0, abs=1e-12)
    assert dv == pytest.approx(0.0, abs=1e-12)

    for model in (holling, lv):
        du, dv = kinetics(model, 1.0, 0.0)
        assert du == 0.0 and dv == 0.0

        u_star, v_star = analysis.positive_equilibrium(model)
        du, dv = kinetics(model, u_star, v_star)
        assert abs(du) < 1e-12 and abs(dv) < 1e-12


def test_kinetics_by_hand(holling):
    du, dv = kinetics(holling, 0.5, 1.0)
    f = 1.4 * 0.5 / 2.5
    p = 0.5 * 2.5 / 1.4
    assert du == pytest.approx(f * (p - 1.0))
    assert dv == pytest.approx(0.5 * 1.0 * (1 - 1 / 1.7))


@pytest.mark.parametrize("params", BUILTINS)
def test_invariant_region_is_not_left(params):
    params = dict(params)
    model = builtin_model(params.pop("kind"), **params)
    u = np.linspace(0.0, 1.0, 101)
    v = np.linspace(0.0, model.q1, 101)

    du, _ = kinetics(model, 1.0, v)
    assert np.all(du <= 1e-12)
    _, dv = kinetics(model, u, 0.0)
    assert np.all(dv >= 0)
    _, dv = kinetics(model, u, model.q1)
    assert np.all(dv <= 1e-12)
    below = v[v <= float(model.p(0.0))]
    du, _ = kinetics(model, 0.0, below)
    assert np.all(du >= 0)


def test_key_params():
    model = builtin_model("holling2", a=1.4, e1=2.0, mu=1.2)
    assert list(model.key_params()) == ["a", "e1", "mu", "d", "s"]
    assert list(builtin_model("lv", a=4.5).key_params()) == [
        "a",
        "mu",
        "d",
        "s",
    ]
