import math

import numpy as np
import pytest

from lgwave import analysis
from lgwave.errors import ComplexEigenvalues, DomainError, PreconditionError
from lgwave.model import CustomKinetics, builtin_model, custom_model


@pytest.mark.parametrize(
    "d,s,expected",
    [(1.0, 0.5, math.sqrt(2.0)), (1.0, 1.0, 2.0), (4.0, 0.25, 2.0)],
)
def test_critical_speed(d, s, expected):
    model = builtin_model("lv", a=1.0, d=d, s=s)
    assert analysis.critical_speed(model) == pytest.approx(expected)


def test_predator_eigenvalues(holling):
    lam1, lam2 = analysis.predator_eigenvalues(holling, 2.0)
    assert lam1 == pytest.approx(1 - math.sqrt(0.5), abs=1e-5)
    assert lam2 == pytest.approx(1 + math.sqrt(0.5), abs=1e-5)
    assert lam1 + lam2 == pytest.approx(2.0, abs=1e-10)
    assert lam1 * lam2 == pytest.approx(0.5, abs=1e-10)


def test_predator_eigenvalues_double_root(holling):
    c_star = analysis.critical_speed(holling)
    lam1, lam2 = analysis.predator_eigenvalues(holling, c_star)
    assert lam1 == lam2 == c_star / 2.0


@pytest.mark.parametrize(
    "c", [math.sqrt(2.0), 2.0 * math.sqrt(0.5), math.sqrt(2.0) * (1 + 4e-16)]
)
def test_predator_eigenvalues_rounded_critical_speed(holling, c):
    lam1, lam2 = analysis.predator_eigenvalues(holling, c)
    assert lam1 == lam2 == c / 2.0
    assert analysis.at_critical_speed(holling, c)
    assert analysis.wave_context(holling, c).critical


@pytest.mark.parametrize("c", [1.0, 0.99 * math.sqrt(2.0), 0.0])
def test_predator_eigenvalues_below_critical(holling, c):
    with pytest.raises(ComplexEigenvalues, match="c below critical speed"):
        analysis.predator_eigenvalues(holling, c)


def test_prey_eigenvalues(lv, holling):
    lam3, lam4 = analysis.prey_eigenvalues(lv, 2.0)
    assert lam3 == pytest.approx((2 + math.sqrt(8)) / 2)
    assert lam4 == pytest.approx((2 - math.sqrt(8)) / 2)

    lam3, lam4 = analysis.prey_eigenvalues(lv, 0.0)
    assert lam3 == pytest.approx(-lam4)
    assert lam3 == pytest.approx(math.sqrt(-lv.f1 * lv.dp1))

    lam3, lam4 = analysis.prey_eigenvalues(holling, 1.5)
    assert lam3 * lam4 == pytest.approx(holling.f1 * holling.dp1, abs=1e-12)


def test_wave_context(lv, holling):
    ctx = analysis.wave_context(lv, 1.5)
    assert ctx.nu1_plus * ctx.nu1_minus == pytest.approx(-ctx.tau, abs=1e-10)
    assert ctx.nu2_plus * ctx.nu2_minus == pytest.approx(
        -ctx.tau / lv.d, abs=1e-10
    )
    assert not ctx.critical

    ctx = analysis.wave_context(holling, 2.0)
    assert ctx.tau > 0.5 * (2 * 2.2 / 1.2 - 1)
    assert ctx.tau >= 1.01 * analysis.tau_lower_bound(holling) - 1e-12

    with pytest.raises(ComplexEigenvalues):
        analysis.wave_context(holling, 1.0)


def test_positive_equilibrium(holling, lv):
    u_star, v_star = analysis.positive_equilibrium(lv)
    assert (u_star, v_star) == pytest.approx((0.1, 0.2), abs=1e-10)

    u_star, v_star = analysis.positive_equilibrium(holling)
    assert (u_star, v_star) == pytest.approx((0.1266, 1.3266), abs=1e-4)
    assert analysis.holling_K(u_star, 1.4, 2.0, 1.2) == pytest.approx(
        0.0, abs=1e-10
    )

    fig2 = builtin_model("holling2", a=0.7, e1=1.2, mu=1.4)
    assert analysis.positive_equilibrium(fig2) == pytest.approx(
        (0.2, 1.6), abs=1e-6
    )

    assert analysis.positive_equilibrium(builtin_model("lv", a=15.0)) is None


@pytest.mark.parametrize(
    "a,mu", [(0.5, 0.1), (2.0, 0.1), (4.5, 0.1), (3.0, 0.3)]
)
def test_lv_equilibrium_closed_form(a, mu):
    model = builtin_model("lv", a=a, mu=mu)
    numeric = analysis.positive_equilibrium(model)
    assert numeric == pytest.approx(analysis.lv_equilibrium(a, mu), abs=1e-10)


def test_equilibria_names(holling):
    named = analysis.equilibria(holling).named()
    assert named["prey_free"] == (0.0, 1.2)
    assert named["prey_present"] == (1.0, 0.0)
    assert "coexistence" in named


def test_condition_P(holling):
    assert analysis.check_condition_P(holling)
    assert analysis.check_condition_P(builtin_model("lv", a=0.5, mu=0.1))


def test_condition_P_requires_unit_h():
    model = custom_model(
        CustomKinetics(
            f=lambda u: u,
            df=lambda u: np.ones_like(u),
            p=lambda u: 1 - u,
            dp=lambda u: -np.ones_like(u),
            h=lambda u: 1 + u,
            dh=lambda u: np.ones_like(u),
        ),
        mu=0.1,
    )
    with pytest.raises(PreconditionError):
        analysis.check_condition_P(model)


def test_condition_P_requires_positive_equilibrium():
    with pytest.raises(PreconditionError):
        analysis.check_condition_P(builtin_model("lv", a=15.0, mu=0.1))


def test_holling_threshold():
    assert analysis.holling_threshold_abar(2.0, 1.2) == pytest.approx(
        1.4373, abs=1e-4
    )
    assert analysis.holling_threshold_abar(1.2, 1.4) == pytest.approx(
        0.8571, abs=1e-4
    )
    assert analysis.holling_threshold_abar(1.0, 1.0) == 1.0
    with pytest.raises(DomainError):
        analysis.holling_threshold_abar(0.5, 1.0)


def test_holling_threshold_continuous_at_e1_equal_e2():
    below = analysis.holling_threshold_abar(1.5, 1.5 + 1e-6)
    above = analysis.holling_threshold_abar(1.5, 1.5 - 1e-6)
    assert below == pytest.approx(above, abs=1e-5)


def test_lv_threshold():
    assert analysis.lv_threshold_abar(0.1) == pytest.approx(4.5895, abs=1e-4)
    root = analysis.lv_cubic_root(0.1)
    assert analysis.lv_cubic(root, 0.1) == pytest.approx(0.0, abs=1e-9)
    assert root > 1 / 1.1
    assert analysis.lv_cubic(1 / 1.1, 0.1) < 0


def test_lv_threshold_takes_the_min():
    e2 = 10.0
    root = analysis.lv_cubic_root(e2)
    assert root > 0.1
    assert analysis.lv_threshold_abar(e2) == pytest.approx(0.1)


def test_preyfree_condition():
    fig3 = builtin_model("holling2", a=15.0, e1=1.2, mu=0.5)
    assert analysis.preyfree_condition(fig3)
    assert analysis.preyfree_condition(builtin_model("lv", a=111.0, mu=0.1))
    assert not analysis.preyfree_condition(builtin_model("lv", a=15.0, mu=0.1))


def test_preyfree_condition_needs_g():
    model = custom_model(
        CustomKinetics(
            f=lambda u: u,
            df=lambda u: np.ones_like(u),
            p=lambda u: 1 - u,
            dp=lambda u: -np.ones_like(u),
            h=lambda u: np.ones_like(u),
            dh=lambda u: np.zeros_like(u),
        ),
        mu=0.1,
    )
    with pytest.raises(PreconditionError):
        analysis.preyfree_condition(model)


def test_preyfree_state_stability():
    assert analysis.preyfree_state_stable(builtin_model("lv", a=15.0))
    assert not analysis.preyfree_state_stable(builtin_model("lv", a=4.5))
