"""Lyapunov functions along wave orbits.

Three constructions are available:

* ``COEXISTENCE`` for ``h = 1`` with the positive equilibrium,
* ``PREY_FREE`` for waves ending at ``(0, mu)``, with constant ``rho``,
* ``NOVEL`` for Lotka-Volterra kinetics, with constant ``rho``.

For each, ``L`` is a function of the wave state ``(u, w, v, y)`` and ``L'``
its derivative along solutions of the wave system, given in closed form.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Any, Optional

import numpy as np
from scipy import integrate

from lgwave import analysis
from lgwave.errors import DomainError, EmptyInterval, PreconditionError
from lgwave.log import logger
from lgwave.model import ModelKind, ModelSpec
from lgwave.waveode import Profile, check_derivative_estimates

Array = Any

QUAD_TOL = 1e-12
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


class LyapunovFamily(str, enum.Enum):
    COEXISTENCE = "coexistence"
    PREY_FREE = "preyfree"
    NOVEL = "novel"


@dataclasses.dataclass(frozen=True)
class LyapunovKind:
    family: LyapunovFamily
    rho: Optional[float] = None

    @classmethod
    def coexistence(cls) -> LyapunovKind:
        return cls(LyapunovFamily.COEXISTENCE)

    @classmethod
    def prey_free(cls, model: ModelSpec) -> LyapunovKind:
        return cls(LyapunovFamily.PREY_FREE, select_rho_preyfree(model))

    @classmethod
    def novel(cls, model: ModelSpec) -> LyapunovKind:
        return cls(LyapunovFamily.NOVEL, select_rho_novel(model))

    def require_rho(self) -> float:
        if self.rho is None:
            raise PreconditionError(f"{self.family.value} needs rho")
        return self.rho


# ---------------------------------------------------------------------------
# constants


def select_rho_preyfree(model: ModelSpec) -> float:
    lower = (
        model.s
        * float(model.h(1.0))
        / (model.mu * analysis.preyfree_g_min(model))
    )
    upper = (
        model.s
        * model.mu
        * float(model.h(0.0))
        / (float(model.h(1.0)) + model.mu)
    )
    if not lower < upper:
        raise EmptyInterval("rho", lower, upper)
    return 0.5 * (lower + upper)


def _require_lv(model: ModelSpec) -> tuple[float, float]:
    if model.kind is not ModelKind.LOTKA_VOLTERRA:
        raise PreconditionError("the novel construction needs Lotka-Volterra")
    eq = analysis.lv_equilibrium(model.a, model.mu)
    if eq is None:
        raise PreconditionError("no positive equilibrium (a mu >= 1)")
    return eq


def quadratic_band(model: ModelSpec, u: Array) -> tuple[Array, Array]:
    """Roots ``r-(u) < r+(u)`` of the quadratic in ``rho s``."""
    u_star, _ = _require_lv(model)
    root = math.sqrt(model.a + 1.0)
    scale = np.asarray(u, dtype=float) + u_star + model.mu
    return scale * (root - 1.0) ** 2, scale * (root + 1.0) ** 2


def select_rho_novel(model: ModelSpec) -> float:
    u_star, _ = _require_lv(model)
    root = math.sqrt(model.a + 1.0)
    lower = (1.0 + u_star + model.mu) * (root - 1.0) ** 2
    upper = (u_star + model.mu) * (root + 1.0) ** 2
    cubic_negative = analysis.lv_cubic(model.a, model.mu) < 0
    if (lower < upper) != cubic_negative:
        logger.warning(
            "band and cubic disagree", a=model.a, lower=lower, upper=upper
        )
    if not lower < upper:
        raise EmptyInterval("rho s", lower, upper)
    return 0.5 * (lower + upper) / model.s


def auto_kind(model: ModelSpec) -> LyapunovKind:
    """Picks the construction whose hypotheses hold for the model."""
    if analysis.positive_equilibrium(model) is None:
        return LyapunovKind.prey_free(model)
    try:
        if analysis.check_condition_P(model):
            return LyapunovKind.coexistence()
    except PreconditionError:
        pass
    if model.kind is ModelKind.LOTKA_VOLTERRA:
        return LyapunovKind.novel(model)
    # condition (P) fails; the descent check reports the outcome
    analysis.require_unit_h(model, 1000)
    return LyapunovKind.coexistence()


# ---------------------------------------------------------------------------
# pieces


def preyfree_C(model: ModelSpec, rho: float, u: Array, v: Array) -> Array:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return (
        1.0
        - model.g(u) * v
        + model.s * (v - model.q0) * model.h(u) / (rho * model.q(u))
    )


def novel_hcal(model: ModelSpec, rho: float, u: Array, v: Array) -> Array:
    u_star, v_star = _require_lv(model)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    e2 = model.mu
    return (u + u_star + e2) * (u - u_star) * (
        1.0 - u - model.a * v
    ) + rho * model.s * (v - v_star) * (u + e2 - v)


def _coexistence_integrand(model: ModelSpec, u_star: float):
    def integrand(eta: Array) -> Array:
        return (eta - u_star) / (model.q(eta) * model.f(eta))

    return integrand


def coexistence_H(model: ModelSpec, u: float, v: float) -> float:
    u_star, v_star = _coexistence_equilibrium(model)
    if u <= 0 or v <= 0:
        raise DomainError(f"H needs u, v > 0, got ({u}, {v})")
    integral, _ = integrate.quad(
        _coexistence_integrand(model, u_star),
        u_star,
        u,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
    )
    return float(integral + _log_term(v, v_star) / model.s)


def _log_term(v: Array, v_star: float) -> Array:
    return v - v_star - v_star * np.log(v / v_star)


def _coexistence_equilibrium(model: ModelSpec) -> tuple[float, float]:
    analysis.require_unit_h(model, 1000)
    eq = analysis.positive_equilibrium(model)
    if eq is None:
        raise PreconditionError("the coexistence construction needs p(0) > mu")
    return eq


def _cumulative_H_u(
    model: ModelSpec, u_star: float, u: np.ndarray
) -> np.ndarray:
    """``int_{u*}^{u} (eta - u*) / (q f) d eta`` for many u at once."""
    lo, hi = min(u.min(), u_star), max(u.max(), u_star)
    breaks = np.unique(
        np.concatenate([u, [u_star], np.arange(lo, hi, 1e-3)])
    )
    left, right = breaks[:-1], breaks[1:]
    mid, half = 0.5 * (left + right), 0.5 * (right - left)
    nodes = mid[:, None] + half[:, None] * GAUSS_NODES[None, :]
    integrand = _coexistence_integrand(model, u_star)
    pieces = half * (integrand(nodes) @ GAUSS_WEIGHTS)
    cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
    anchor = cumulative[np.searchsorted(breaks, u_star)]
    return (cumulative - anchor)[np.searchsorted(breaks, u)]


# ---------------------------------------------------------------------------
# L and L'


def _values(
    kind: LyapunovKind,
    model: ModelSpec,
    c: float,
    states: np.ndarray,
    big_h_u: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, np.ndarray]:
    u, w, v, y = (np.asarray(x, dtype=float) for x in states)
    d, s = model.d, model.s
    family = kind.family

    if family is LyapunovFamily.PREY_FREE:
        rho = kind.require_rho()
        q0 = model.q0
        if np.any(u < 0) or np.any(v <= 0):
            raise DomainError("the prey-free L needs u >= 0 and v > 0")
        value = (
            rho * (c * u - w)
            + c * (v - q0 - q0 * np.log(v / q0))
            - d * y
            + d * q0 * y / v
        )
        prime = (
            -rho * u * u
            - s * (v - q0) ** 2 / model.q(u)
            - d * q0 * (y / v) ** 2
            + rho * u * preyfree_C(model, rho, u, v)
        )
        return value, prime

    if np.any(u <= 0) or np.any(v <= 0):
        raise DomainError("L needs u > 0 and v > 0")

    if family is LyapunovFamily.COEXISTENCE:
        u_star, v_star = _coexistence_equilibrium(model)
        f, df = model.f(u), model.df(u)
        q, dq = model.q(u), model.dq(u)
        if big_h_u is None:
            big_h_u = _cumulative_H_u(model, u_star, np.atleast_1d(u))
            big_h_u = big_h_u.reshape(np.shape(u))
        big_h = big_h_u + _log_term(v, v_star) / s
        h_u = (u - u_star) / (f * q)
        h_v = (v - v_star) / (s * v)
        h_uu = (f * q - (u - u_star) * (df * q + f * dq)) / (f * q) ** 2
        h_vv = v_star / (s * v * v)
        value = c * big_h - w * h_u - d * y * h_v
        prime = (
            ((u - u_star) * (model.p(u) - model.p(u_star)) - (v - v_star) ** 2)
            / q
            - w * w * h_uu
            - d * y * y * h_vv
        )
        return value, prime

    rho = kind.require_rho()
    u_star, v_star = _require_lv(model)
    e2 = model.mu
    big_k = (u_star + e2) * u_star
    big_h = (
        (u - u_star)
        - big_k / e2 * (np.log(u / (u + e2)) - math.log(u_star / (u_star + e2)))
        + rho * _log_term(v, v_star)
    )
    h_u = (u + u_star + e2) * (u - u_star) / ((u + e2) * u)
    h_v = rho * (v - v_star) / v
    h_uu = big_k * (2.0 * u + e2) / ((u + e2) * u) ** 2
    h_vv = rho * v_star / (v * v)
    value = c * big_h - w * h_u - d * y * h_v
    prime = (
        novel_hcal(model, rho, u, v) / (u + e2)
        - w * w * h_uu
        - d * y * y * h_vv
    )
    return value, prime


def lyapunov_value(
    kind: LyapunovKind, model: ModelSpec, state: Array, c: float
) -> tuple[float, float]:
    """``(L, L')`` at a single wave state ``(u, w, v, y)`` for speed c."""
    u, w, v, y = (float(x) for x in state)
    if kind.family is LyapunovFamily.COEXISTENCE and u > 0 and v > 0:
        u_star, _ = _coexistence_equilibrium(model)
        big_h_u, _ = integrate.quad(
            _coexistence_integrand(model, u_star),
            u_star,
            u,
            epsabs=QUAD_TOL,
            epsrel=QUAD_TOL,
        )
        value, prime = _values(
            kind, model, c, np.array([u, w, v, y]), np.asarray(big_h_u)
        )
    else:
        value, prime = _values(kind, model, c, np.array([u, w, v, y]))
    return float(value), float(prime)


def lyapunov_along(
    kind: LyapunovKind, model: ModelSpec, profile: Profile
) -> tuple[np.ndarray, np.ndarray]:
    return _values(kind, model, profile.c, profile.states)


@dataclasses.dataclass(frozen=True)
class DescentReport:
    family: LyapunovFamily
    rho: Optional[float]
    passed: bool
    max_prime: float
    max_prime_z: float
    max_increase: float
    max_increase_z: float
    in_D: bool
    n_points: int

    def as_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["family"] = self.family.value
        if self.rho is None:
            del out["rho"]
        return out


def verify_descent(
    kind: LyapunovKind,
    model: ModelSpec,
    profile: Profile,
    tol: float = 1e-8,
) -> DescentReport:
    """Checks that L decreases along the profile and that ``L' <= tol``."""
    estimates = check_derivative_estimates(profile, model)
    value, prime = lyapunov_along(kind, model, profile)

    i_prime = int(np.argmax(prime))
    increase = np.diff(value) / np.maximum(
        1.0, np.maximum(np.abs(value[:-1]), np.abs(value[1:]))
    )
    i_inc = int(np.argmax(increase)) if len(increase) else 0
    max_increase = float(increase[i_inc]) if len(increase) else 0.0
    passed = bool(prime[i_prime] <= tol and max_increase <= tol)
    report = DescentReport(
        family=kind.family,
        rho=kind.rho,
        passed=passed,
        max_prime=float(prime[i_prime]),
        max_prime_z=float(profile.z[i_prime]),
        max_increase=max_increase,
        max_increase_z=float(profile.z[i_inc + 1]) if len(increase) else 0.0,
        in_D=estimates.set_D_ok,
        n_points=len(profile),
    )
    logger.info(
        "descent check",
        family=kind.family.value,
        passed=passed,
        max_prime=report.max_prime,
    )
    return report
