"""Equilibria, spectral data and closed-form existence thresholds."""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np
from scipy import optimize

from lgwave.errors import ComplexEigenvalues, DomainError, PreconditionError
from lgwave.log import logger
from lgwave.model import ModelSpec

TAU_MARGIN = 1.01
TAU_GRID = 10_000
BISECT_XTOL = 1e-15
CRITICAL_RTOL = 1e-12


def critical_speed(model: ModelSpec) -> float:
    return 2.0 * math.sqrt(model.d * model.s)


def at_critical_speed(model: ModelSpec, c: float) -> bool:
    """True when ``|c|`` equals ``c*`` up to rounding."""
    return math.isclose(abs(c), critical_speed(model), rel_tol=CRITICAL_RTOL)


def predator_eigenvalues(model: ModelSpec, c: float) -> tuple[float, float]:
    """Roots of ``d l^2 - c l + s``, ordered ``lambda1 <= lambda2``.

    At ``c = c*`` (up to rounding) both roots are exactly ``c / (2 d)``.
    """
    if at_critical_speed(model, c):
        lam = c / (2.0 * model.d)
        return lam, lam
    if abs(c) < critical_speed(model):
        raise ComplexEigenvalues(c, critical_speed(model))
    disc = c * c - 4.0 * model.d * model.s
    root = math.sqrt(max(disc, 0.0))
    return (c - root) / (2.0 * model.d), (c + root) / (2.0 * model.d)


def prey_eigenvalues(model: ModelSpec, c: float) -> tuple[float, float]:
    """The prey rates ``lambda3 > 0 > lambda4`` of the linearization at e0."""
    if c < 0:
        raise PreconditionError(f"c must be non-negative, got {c}")
    product = model.f1 * model.dp1
    root = math.sqrt(c * c - 4.0 * product)
    return (c + root) / 2.0, (c - root) / 2.0


def tau_lower_bound(model: ModelSpec, n_grid: int = TAU_GRID) -> float:
    u = np.linspace(0.0, 1.0, n_grid)
    prey_term = np.max(
        model.f1 * np.abs(model.dp(u)) + model.q1 * np.abs(model.df(u))
    )
    predator_term = model.s * (2.0 * model.q1 / model.q0 - 1.0)
    return float(max(prey_term, predator_term))


@dataclasses.dataclass(frozen=True)
class WaveContext:
    c: float
    c_star: float
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    tau: float
    nu1_minus: float
    nu1_plus: float
    nu2_minus: float
    nu2_plus: float
    f1: float
    f1_dp1: float

    @property
    def critical(self) -> bool:
        return self.lambda1 == self.lambda2

    def psi(self, lam: float) -> float:
        return (lam * lam - self.c * lam + self.f1_dp1) / self.f1


def wave_context(model: ModelSpec, c: float) -> WaveContext:
    lambda1, lambda2 = predator_eigenvalues(model, c)
    if c < 0:
        raise PreconditionError(f"c must be non-negative, got {c}")
    lambda3, lambda4 = prey_eigenvalues(model, c)
    tau = TAU_MARGIN * tau_lower_bound(model)
    root1 = math.sqrt(c * c + 4.0 * tau)
    root2 = math.sqrt(c * c + 4.0 * model.d * tau)
    return WaveContext(
        c=float(c),
        c_star=critical_speed(model),
        lambda1=lambda1,
        lambda2=lambda2,
        lambda3=lambda3,
        lambda4=lambda4,
        tau=tau,
        nu1_minus=(c - root1) / 2.0,
        nu1_plus=(c + root1) / 2.0,
        nu2_minus=(c - root2) / (2.0 * model.d),
        nu2_plus=(c + root2) / (2.0 * model.d),
        f1=model.f1,
        f1_dp1=model.f1 * model.dp1,
    )


@dataclasses.dataclass(frozen=True)
class EquilibriumSet:
    boundary: tuple[tuple[float, float], ...]
    positive: Optional[tuple[float, float]]

    @property
    def prey_present(self) -> tuple[float, float]:
        return self.boundary[1]

    @property
    def prey_free(self) -> tuple[float, float]:
        return self.boundary[2]

    def named(self) -> dict[str, tuple[float, float]]:
        points = {
            "trivial": self.boundary[0],
            "prey_present": self.boundary[1],
            "prey_free": self.boundary[2],
        }
        if self.positive is not None:
            points["coexistence"] = self.positive
        return points


def positive_equilibrium(model: ModelSpec) -> Optional[tuple[float, float]]:
    """The root of ``Q(u) = p(u) - u h(u) - mu`` on (0, 1), if any."""
    if not float(model.p(0.0)) > model.mu:
        return None

    def Q(u: float) -> float:
        return float(model.p(u) - u * model.h(u) - model.mu)

    u_star = optimize.bisect(Q, 0.0, 1.0, xtol=BISECT_XTOL, maxiter=500)
    return float(u_star), float(model.q(u_star))


def equilibria(model: ModelSpec) -> EquilibriumSet:
    return EquilibriumSet(
        boundary=((0.0, 0.0), (1.0, 0.0), (0.0, model.mu)),
        positive=positive_equilibrium(model),
    )


def preyfree_state_stable(model: ModelSpec) -> bool:
    """Kinetic stability of (0, mu): the prey rate there is f'(0)(p(0)-mu)."""
    return float(model.p(0.0)) < model.mu


def require_unit_h(model: ModelSpec, n_samples: int) -> None:
    u = np.linspace(0.0, 1.0, max(n_samples, 2))
    if not (np.allclose(model.h(u), 1.0) and np.allclose(model.dh(u), 0.0)):
        raise PreconditionError("condition (P) requires h(u) = 1")


def check_condition_P(model: ModelSpec, n_samples: int = 10_000) -> bool:
    """``(u*+mu) f(u) - (u-u*)(u+mu) f'(u) > 0`` on an open grid of (0,1)."""
    require_unit_h(model, n_samples)
    eq = positive_equilibrium(model)
    if eq is None:
        raise PreconditionError("condition (P) requires p(0) > mu")
    u_star = eq[0]
    u = (np.arange(n_samples) + 0.5) / n_samples
    expr = (u_star + model.mu) * model.f(u) - (u - u_star) * (
        u + model.mu
    ) * model.df(u)
    return bool(np.all(expr > 0))


# ---------------------------------------------------------------------------
# Holling II thresholds


def holling_gamma(x: float, e1: float, e2: float) -> float:
    return (1.0 - x) * (x + e1) / (x + e2)


def holling_lambda(e1: float, e2: float) -> float:
    return (e1 - e2) / (1.0 + 2.0 * e1 + e1 * e2)


def holling_K(u: float, a: float, e1: float, e2: float) -> float:
    """Equilibrium quadratic; its root in (0, 1) is u*."""
    return u * u - (1.0 - a - e1) * u + (a * e2 - e1)


def holling_threshold_abar(e1: float, e2: float) -> float:
    if e1 < 1:
        raise DomainError(f"the Holling II threshold requires e1 >= 1: {e1}")
    if e2 <= 0:
        raise DomainError(f"e2 must be positive, got {e2}")
    if e1 <= e2:
        return e1 / e2
    return min(e1 / e2, holling_gamma(holling_lambda(e1, e2), e1, e2))


# ---------------------------------------------------------------------------
# Lotka-Volterra thresholds


def lv_cubic(a: float, e2: float) -> float:
    return (
        a**3 + a**2 - 16.0 * a * (1.0 + e2) - 16.0 * (1.0 + e2) * (2.0 + e2)
    )


def lv_cubic_root(e2: float) -> float:
    """The unique positive root of the cubic, bracketed by doubling."""
    if e2 <= 0:
        raise DomainError(f"e2 must be positive, got {e2}")
    a_hi = 1.0
    while lv_cubic(a_hi, e2) <= 0:
        a_hi *= 2.0
    root = float(
        optimize.bisect(
            lv_cubic, 0.0, a_hi, args=(e2,), xtol=BISECT_XTOL, maxiter=500
        )
    )
    if not root > 1.0 / (1.0 + e2):
        raise DomainError(f"cubic root {root} not above 1/(1+e2)")
    logger.debug("lv cubic root", e2=e2, root=root)
    return root


def lv_threshold_abar(e2: float) -> float:
    return min(lv_cubic_root(e2), 1.0 / e2)


def lv_equilibrium(a: float, e2: float) -> Optional[tuple[float, float]]:
    if not a * e2 < 1:
        return None
    return (1.0 - a * e2) / (1.0 + a), (1.0 + e2) / (1.0 + a)


# ---------------------------------------------------------------------------
# prey-free wave condition


def preyfree_g_min(model: ModelSpec, n_grid: int = 10_001) -> float:
    if not model.has_g:
        raise PreconditionError("the prey-free condition needs f(u) = u g(u)")
    u = np.linspace(0.0, 1.0, n_grid)
    return float(np.min(model.g(u)))


def preyfree_threshold(model: ModelSpec) -> float:
    h0 = float(model.h(0.0))
    h1 = float(model.h(1.0))
    return h1 * (h1 + model.mu) / (model.mu**2 * h0)


def preyfree_condition(model: ModelSpec) -> bool:
    return preyfree_g_min(model) > preyfree_threshold(model)
