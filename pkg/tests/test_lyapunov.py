import math

import numpy as np
import pytest

from lgwave import analysis, lyapunov
from lgwave.errors import DomainError, EmptyInterval, PreconditionError
from lgwave.lyapunov import LyapunovFamily, LyapunovKind
from lgwave.model import builtin_model

from .conftest import fig1_model, fig2_model, fig3_model, fig5_model


def open_grid(low: float, high: float, n: int) -> np.ndarray:
    return low + (high - low) * (np.arange(n) + 0.5) / n


def test_rho_preyfree():
    rho = lyapunov.select_rho_preyfree(builtin_model("lv", a=111.0, mu=0.1))
    lower, upper = 0.5 / 11.1, 0.5 * 0.01 / 1.1
    assert lower < rho < upper
    assert rho == pytest.approx(0.5 * (lower + upper))

    with pytest.raises(EmptyInterval):
        lyapunov.select_rho_preyfree(builtin_model("lv", a=15.0, mu=0.1))

    model = fig3_model()
    rho = lyapunov.select_rho_preyfree(model)
    lower = model.s / (model.mu * 15.0 / 2.2)
    upper = model.s * model.mu / (1.0 + model.mu)
    assert rho == pytest.approx(0.5 * (lower + upper))


def test_rho_novel():
    model = fig5_model()
    rho = lyapunov.select_rho_novel(model)
    root = math.sqrt(5.5)
    lower = (1.0 + 0.1 + 0.1) * (root - 1.0) ** 2
    upper = (0.1 + 0.1) * (root + 1.0) ** 2
    assert rho * model.s == pytest.approx(0.5 * (lower + upper))

    with pytest.raises(EmptyInterval):
        lyapunov.select_rho_novel(builtin_model("lv", a=4.6, mu=0.1))

    small = builtin_model("lv", a=1e-4, mu=0.1)
    assert lyapunov.select_rho_novel(small) > 0


@pytest.mark.parametrize("a", [0.5, 2.0, 4.0, 4.58, 4.6, 6.0])
def test_novel_band_agrees_with_threshold(a):
    model = builtin_model("lv", a=a, mu=0.1)
    accepted = True
    try:
        lyapunov.select_rho_novel(model)
    except EmptyInterval:
        accepted = False
    assert accepted == (a < analysis.lv_threshold_abar(0.1))


def test_novel_needs_lotka_volterra(holling):
    with pytest.raises(PreconditionError):
        lyapunov.select_rho_novel(holling)


def test_quadratic_band(lv):
    r_minus, r_plus = lyapunov.quadratic_band(lv, 0.0)
    assert r_minus == pytest.approx(0.2 * (math.sqrt(5.5) - 1.0) ** 2)

    u = np.linspace(0.0, 1.0, 11)
    r_minus, r_plus = lyapunov.quadratic_band(lv, u)
    assert np.all(r_minus < r_plus)
    scale = u + 0.1 + 0.1
    for root in (r_minus, r_plus):
        big_r = root**2 - 2 * (4.5 + 2) * scale * root + 4.5**2 * scale**2
        assert np.max(np.abs(big_r)) < 1e-10


def test_coexistence_value_at_equilibrium(holling):
    u_star, v_star = analysis.positive_equilibrium(holling)
    value, prime = lyapunov.lyapunov_value(
        LyapunovKind.coexistence(), holling, (u_star, 0.0, v_star, 0.0), 1.5
    )
    assert value == pytest.approx(0.0, abs=1e-14)
    assert prime == pytest.approx(0.0, abs=1e-14)


def test_novel_value_is_decreasing(lv):
    kind = LyapunovKind.novel(lv)
    _, prime = lyapunov.lyapunov_value(kind, lv, (0.5, -0.1, 0.3, 0.05), 1.5)
    assert prime < 0


def test_preyfree_value_vanishes_at_prey_free_state():
    model = fig3_model()
    kind = LyapunovKind.prey_free(model)
    state = (0.0, -0.3, model.mu, 0.0)
    _, prime = lyapunov.lyapunov_value(kind, model, state, 1.5)
    assert prime == 0.0


def test_value_rejects_non_positive_states(holling):
    with pytest.raises(DomainError):
        lyapunov.lyapunov_value(
            LyapunovKind.coexistence(), holling, (0.0, 0.0, 1.0, 0.0), 1.5
        )
    with pytest.raises(PreconditionError):
        lyapunov.lyapunov_value(
            LyapunovKind(LyapunovFamily.NOVEL),
            fig5_model(),
            (0.5, 0, 0.3, 0),
            1.5,
        )


def test_coexistence_H_is_non_negative(holling):
    u_star, v_star = analysis.positive_equilibrium(holling)
    u = open_grid(0.0, 1.0, 200)
    v = open_grid(0.0, holling.q1, 200)
    h_u = np.array([lyapunov.coexistence_H(holling, x, v_star) for x in u])
    h_v = (v - v_star - v_star * np.log(v / v_star)) / holling.s
    total = h_u[:, None] + h_v[None, :]
    assert np.all(total > 0)
    assert lyapunov.coexistence_H(holling, u_star, v_star) == pytest.approx(
        0.0, abs=1e-14
    )


def test_novel_hcal_is_non_positive(lv):
    rho = lyapunov.select_rho_novel(lv)
    u = open_grid(0.0, 1.0, 200)
    v = open_grid(0.0, lv.q1, 200)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    assert np.max(lyapunov.novel_hcal(lv, rho, uu, vv)) <= 1e-12


def test_preyfree_C_is_negative():
    model = fig3_model()
    rho = lyapunov.select_rho_preyfree(model)
    u = np.linspace(0.0, 1.0, 201)
    v = np.linspace(0.0, model.q1, 201)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    assert np.all(lyapunov.preyfree_C(model, rho, uu, vv) < 0)


def test_auto_kind(holling, lv):
    assert lyapunov.auto_kind(holling).family is LyapunovFamily.COEXISTENCE
    assert lyapunov.auto_kind(lv).family is LyapunovFamily.NOVEL
    kind = lyapunov.auto_kind(fig3_model())
    assert kind.family is LyapunovFamily.PREY_FREE
    assert kind.rho is not None


def test_novel_certifies_beyond_condition_P(lv):
    assert lv.a < analysis.lv_threshold_abar(lv.mu)
    assert not analysis.check_condition_P(lv)
    assert lyapunov.select_rho_novel(lv) > 0


def test_descent_coexistence(fig1_profile, fig2_profile):
    kind = LyapunovKind.coexistence()
    for profile, model in (
        (fig1_profile, fig1_model()),
        (fig2_profile, fig2_model()),
    ):
        report = lyapunov.verify_descent(kind, model, profile)
        assert report.passed, report.as_dict()
        assert report.in_D
        assert report.max_prime <= 1e-8
        assert "rho" not in report.as_dict()


def test_descent_novel(fig5_profile):
    model = fig5_model()
    kind = LyapunovKind.novel(model)
    report = lyapunov.verify_descent(kind, model, fig5_profile)
    assert report.passed, report.as_dict()
    assert report.as_dict()["family"] == "novel"


def test_descent_prey_free(fig3_profile):
    model = fig3_model()
    kind = LyapunovKind.prey_free(model)
    report = lyapunov.verify_descent(kind, model, fig3_profile)
    assert report.passed, report.as_dict()
    assert report.rho == kind.rho


def test_orbital_derivative_matches_finite_differences(fig1_profile):
    model = fig1_model()
    value, prime = lyapunov.lyapunov_along(
        LyapunovKind.coexistence(), model, fig1_profile
    )
    numeric = np.gradient(value, fig1_profile.z)
    inner = slice(1, -1)
    big = np.abs(prime[inner]) > 1e-3 * np.max(np.abs(prime))
    rel = np.abs(numeric[inner][big] - prime[inner][big]) / np.abs(
        prime[inner][big]
    )
    assert np.max(rel) < 1e-3
