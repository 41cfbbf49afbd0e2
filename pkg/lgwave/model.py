"""The generalized Leslie-Gower model family.

A model is the kinetic triple ``(f, p, h)`` together with the constants
``d``, ``s`` and ``mu``. The reaction terms read::

    du/dt = u_xx + f(u) (p(u) - v)
    dv/dt = d v_xx + s v (1 - v / q(u)),     q(u) = u h(u) + mu
"""

from __future__ import annotations

import dataclasses
import enum
from typing import Any, Callable, Optional, Union

import numpy as np

from lgwave.errors import DomainError, PreconditionError

Array = Any
Evaluator = Callable[[Array], Array]

# below this value of m*u the Ivlev quotient is evaluated by its series
IVLEV_SERIES_CUTOFF = 1e-6


class ModelKind(str, enum.Enum):
    LOTKA_VOLTERRA = "lv"
    HOLLING_II = "holling2"
    IVLEV = "ivlev"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value: Union[str, ModelKind]) -> ModelKind:
        if isinstance(value, ModelKind):
            return value
        aliases = {
            "lotkavolterra": cls.LOTKA_VOLTERRA,
            "lotka-volterra": cls.LOTKA_VOLTERRA,
            "hollingii": cls.HOLLING_II,
            "holling": cls.HOLLING_II,
        }
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown model kind {value!r} ({choices})")


@dataclasses.dataclass(frozen=True)
class CustomKinetics:
    """User supplied evaluators for a custom model.

    ``g`` is optional; when given, ``f(u) = u g(u)`` and
    ``p(u) = (1 - u) / g(u)`` must hold.
    """

    f: Evaluator
    df: Evaluator
    p: Evaluator
    dp: Evaluator
    h: Evaluator
    dh: Evaluator
    g: Optional[Evaluator] = None


def _asarray(u: Array) -> Array:
    return np.asarray(u, dtype=float)


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    a: float = 1.0
    e1: float = 1.0
    m: float = 1.0
    d: float = 1.0
    s: float = 0.5
    mu: float = 0.1
    custom: Optional[CustomKinetics] = dataclasses.field(
        default=None, compare=False
    )

    # -------------------------------------------------------------------
    # Ivlev helpers: phi(u) = u / (1 - exp(-m u)), phi(0) = 1 / m

    def _ivlev_phi(self, u: Array) -> tuple[Array, Array]:
        u = _asarray(u)
        x = self.m * u
        small = np.abs(x) < IVLEV_SERIES_CUTOFF
        x_safe = np.where(small, 1.0, x)
        one_minus = -np.expm1(-x_safe)
        e = np.exp(-x_safe)
        phi = np.where(
            small, (1.0 + x / 2 + x**2 / 12) / self.m, u / one_minus
        )
        dphi = np.where(
            small, 0.5 + x / 6, (one_minus - x_safe * e) / one_minus**2
        )
        return phi, dphi

    # -------------------------------------------------------------------
    # kinetic functions

    def f(self, u: Array) -> Array:
        if self.kind is ModelKind.LOTKA_VOLTERRA:
            return self.a * _asarray(u)
        if self.kind is ModelKind.HOLLING_II:
            u = _asarray(u)
            return self.a * u / (u + self.e1)
        if self.kind is ModelKind.IVLEV:
            return -self.a * np.expm1(-self.m * _asarray(u))
        return _asarray(self._custom.f(u))

    def df(self, u: Array) -> Array:
        if self.kind is ModelKind.LOTKA_VOLTERRA:
            return self.a + 0.0 * _asarray(u)
        if self.kind is ModelKind.HOLLING_II:
            u = _asarray(u)
            return self.a * self.e1 / (u + self.e1) ** 2
        if self.kind is ModelKind.IVLEV:
            return self.a * self.m * np.exp(-self.m * _asarray(u))
        return _asarray(self._custom.df(u))

    def p(self, u: Array) -> Array:
        if self.kind is ModelKind.LOTKA_VOLTERRA:
            return (1.0 - _asarray(u)) / self.a
        if self.kind is ModelKind.HOLLING_II:
            u = _asarray(u)
            return (1.0 - u) * (u + self.e1) / self.a
        if self.kind is ModelKind.IVLEV:
            phi, _ = self._ivlev_phi(u)
            return (1.0 - _asarray(u)) * phi / self.a
        return _asarray(self._custom.p(u))

    def dp(self, u: Array) -> Array:
        if self.kind is ModelKind.LOTKA_VOLTERRA:
            return -1.0 / self.a + 0.0 * _asarray(u)
        if self.kind is ModelKind.HOLLING_II:
            return (1.0 - self.e1 - 2.0 * _asarray(u)) / self.a
        if self.kind is ModelKind.IVLEV:
            phi, dphi = self._ivlev_phi(u)
            return (-phi + (1.0 - _asarray(u)) * dphi) / self.a
        return _asarray(self._custom.dp(u))

    def h(self, u: Array) -> Array:
        if self.kind is ModelKind.CUSTOM:
            return _asarray(self._custom.h(u))
        return 1.0 + 0.0 * _asarray(u)

    def dh(self, u: Array) -> Array:
        if self.kind is ModelKind.CUSTOM:
            return _asarray(self._custom.dh(u))
        return 0.0 * _asarray(u)

    def q(self, u: Array) -> Array:
        u = _asarray(u)
        return u * self.h(u) + self.mu

    def dq(self, u: Array) -> Array:
        u = _asarray(u)
        return self.h(u) + u * self.dh(u)

    @property
    def has_g(self) -> bool:
        if self.kind is ModelKind.CUSTOM:
            return self._custom.g is not None
        return True

    def g(self, u: Array) -> Array:
        """The factor with ``f(u) = u g(u)`` and ``p(u) = (1 - u) / g(u)``."""
        if self.kind is ModelKind.LOTKA_VOLTERRA:
            return self.a + 0.0 * _asarray(u)
        if self.kind is ModelKind.HOLLING_II:
            return self.a / (_asarray(u) + self.e1)
        if self.kind is ModelKind.IVLEV:
            phi, _ = self._ivlev_phi(u)
            return self.a / phi
        if self._custom.g is None:
            raise PreconditionError(
                "custom model has no g factorization f(u) = u g(u)"
            )
        return _asarray(self._custom.g(u))

    @property
    def _custom(self) -> CustomKinetics:
        if self.custom is None:
            raise DomainError("custom model without kinetics")
        return self.custom

    # -------------------------------------------------------------------
    # frequently used constants

    @property
    def q0(self) -> float:
        return float(self.q(0.0))

    @property
    def q1(self) -> float:
        return float(self.q(1.0))

    @property
    def f1(self) -> float:
        return float(self.f(1.0))

    @property
    def dp1(self) -> float:
        return float(self.dp(1.0))

    def key_params(self) -> dict[str, float]:
        """Parameters that identify the model in file names."""
        params: dict[str, float] = {"a": self.a}
        if self.kind is ModelKind.HOLLING_II:
            params["e1"] = self.e1
        if self.kind is ModelKind.IVLEV:
            params["m"] = self.m
        params.update(mu=self.mu, d=self.d, s=self.s)
        return params


def builtin_model(
    kind: Union[str, ModelKind],
    a: float,
    e1: float = 1.0,
    m: float = 1.0,
    d: float = 1.0,
    s: float = 0.5,
    mu: float = 0.1,
) -> ModelSpec:
    kind = ModelKind.parse(kind)
    if kind is ModelKind.CUSTOM:
        raise DomainError("custom models are built with custom_model")
    for name, value in dict(a=a, e1=e1, m=m, d=d, s=s, mu=mu).items():
        if not np.isfinite(value) or value <= 0:
            raise DomainError(f"{name} must be positive, got {value}")
    if kind is ModelKind.HOLLING_II and e1 < 1:
        raise DomainError(f"Holling II requires e1 >= 1, got {e1}")
    if kind is ModelKind.IVLEV and not m < 2:
        raise DomainError(f"Ivlev requires 0 < m < 2, got {m}")
    return ModelSpec(
        kind=kind,
        a=float(a),
        e1=float(e1),
        m=float(m),
        d=float(d),
        s=float(s),
        mu=float(mu),
    )


def custom_model(
    kinetics: CustomKinetics,
    d: float = 1.0,
    s: float = 0.5,
    mu: float = 0.1,
    a: float = 1.0,
) -> ModelSpec:
    for name, value in dict(d=d, s=s, mu=mu).items():
        if value <= 0:
            raise DomainError(f"{name} must be positive, got {value}")
    return ModelSpec(
        kind=ModelKind.CUSTOM,
        a=float(a),
        d=float(d),
        s=float(s),
        mu=float(mu),
        custom=kinetics,
    )


@dataclasses.dataclass(frozen=True)
class AssumptionReport:
    h1_ok: bool
    h2_ok: bool
    h3_ok: bool
    violations: list[tuple[str, float, float]]

    @property
    def ok(self) -> bool:
        return self.h1_ok and self.h2_ok and self.h3_ok


def check_assumptions(
    model: ModelSpec,
    u_max: float = 1.0,
    n_samples: int = 10_000,
) -> AssumptionReport:
    """Samples the standing assumptions on ``[0, u_max]``.

    H1: f(0) = 0 and f' > 0 on [0, u_max].
    H2: p(1) = 0 and p' < 0 on (0, u_max].
    H3: h(0) > 0 and h' >= 0 on [0, u_max]; q strictly increasing.
    """
    if u_max < 1:
        raise PreconditionError(f"u_max must be >= 1, got {u_max}")
    if n_samples < 2:
        raise PreconditionError(f"n_samples must be >= 2, got {n_samples}")

    u = np.linspace(0.0, u_max, n_samples)
    violations: list[tuple[str, float, float]] = []

    def record(tag: str, where: Array, values: Array) -> None:
        for x, value in zip(where, values):
            violations.append((tag, float(x), float(value)))

    f0 = float(model.f(0.0))
    if abs(f0) > 1e-14:
        record("H1", [0.0], [f0])
    df = model.df(u)
    bad = ~(df > 0)
    record("H1", u[bad], df[bad])

    p1 = float(model.p(1.0))
    if abs(p1) > 1e-12:
        record("H2", [1.0], [p1])
    dp = model.dp(u[1:])
    bad = ~(dp < 0)
    record("H2", u[1:][bad], dp[bad])

    h0 = float(model.h(0.0))
    if not h0 > 0:
        record("H3", [0.0], [h0])
    dh = model.dh(u)
    bad = ~(dh >= 0)
    record("H3", u[bad], dh[bad])
    dq = np.diff(model.q(u))
    bad = ~(dq > 0)
    record("H3", u[1:][bad], dq[bad])

    tags = {tag for tag, _, _ in violations}
    return AssumptionReport(
        h1_ok="H1" not in tags,
        h2_ok="H2" not in tags,
        h3_ok="H3" not in tags,
        violations=violations,
    )


def kinetics(model: ModelSpec, u: Array, v: Array) -> tuple[Array, Array]:
    u = _asarray(u)
    v = _asarray(v)
    du = model.f(u) * (model.p(u) - v)
    dv = model.s * v * (1.0 - v / model.q(u))
    return du, dv
