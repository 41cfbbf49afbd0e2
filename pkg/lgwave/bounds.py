"""Explicit upper and lower solutions of the wave equations.

For ``c > c*`` (supercritical) and ``c = c*`` (critical) the pair
``(u_upper, v_upper)``, ``(u_lower, v_lower)`` is piecewise analytic with
kinks at ``z1`` (u_lower), ``z2`` (v_lower) and ``kink0`` (v_upper).
All derivatives are implemented per branch; ``side=-1`` selects the
left-hand branch at a kink and ``side=+1`` the right-hand one.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Any, Optional

import numpy as np

from lgwave import analysis
from lgwave.log import logger
from lgwave.model import ModelSpec

Array = Any

CONSTANT_MARGIN = 1.01
BETA_FRACTION = 0.9
EPS_FRACTION = 0.5
KINK_EXCLUSION = 10


class BoundCase(str, enum.Enum):
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"


def _left(z: Array, kink: float, side: int) -> Array:
    return z <= kink if side < 0 else z < kink


@dataclasses.dataclass(frozen=True)
class BoundPair:
    case: BoundCase
    c: float
    beta: float
    sigma: float
    r: float
    z1: float
    z2: float
    kink0: float
    lam: float
    q0: float
    q1: float
    eps: Optional[float] = None
    h_const: Optional[float] = None

    @property
    def kinks(self) -> tuple[float, float, float]:
        return self.z1, self.z2, self.kink0

    def u_upper(self, z: Array, order: int = 0, side: int = -1) -> Array:
        z = np.asarray(z, dtype=float)
        return np.full_like(z, 1.0 if order == 0 else 0.0)

    def u_lower(self, z: Array, order: int = 0, side: int = -1) -> Array:
        z = np.asarray(z, dtype=float)
        zc = np.minimum(z, self.z1)
        e = self.sigma * np.exp(self.beta * zc)
        if order == 0:
            left = 1.0 - e
        else:
            left = -e * self.beta**order
        return np.where(_left(z, self.z1, side), left, 0.0)

    def v_upper(self, z: Array, order: int = 0, side: int = -1) -> Array:
        z = np.asarray(z, dtype=float)
        zc = np.minimum(z, self.kink0)
        lam = self.lam
        e = np.exp(lam * zc)
        if self.case is BoundCase.SUPERCRITICAL:
            left = self.q1 * lam**order * e
        else:
            hq = self.h_const * self.q1  # type: ignore[operator]
            if order == 0:
                left = -hq * zc * e
            elif order == 1:
                left = -hq * e * (1.0 + lam * zc)
            else:
                left = -hq * lam * e * (2.0 + lam * zc)
        right = self.q1 if order == 0 else 0.0
        return np.where(_left(z, self.kink0, side), left, right)

    def _v_lower_factor(self, z: Array, order: int) -> Array:
        """``v_lower^(order) / (q1 e^{lam z})`` on the left branch."""
        lam = self.lam
        if self.case is BoundCase.SUPERCRITICAL:
            eps = self.eps or 0.0
            re = self.r * np.exp(eps * z)
            return lam**order - re * (lam + eps) ** order
        h = self.h_const or 0.0
        mz = np.maximum(-z, 1e-300)
        phi = -h * z - self.r * np.sqrt(mz)
        if order == 0:
            return phi
        dphi = -h + 0.5 * self.r / np.sqrt(mz)
        if order == 1:
            return lam * phi + dphi
        ddphi = 0.25 * self.r * mz**-1.5
        return lam * lam * phi + 2.0 * lam * dphi + ddphi

    def v_lower(self, z: Array, order: int = 0, side: int = -1) -> Array:
        z = np.asarray(z, dtype=float)
        zc = np.minimum(z, self.z2)
        left = self.q1 * np.exp(self.lam * zc) * self._v_lower_factor(
            zc, order
        )
        return np.where(_left(z, self.z2, side), left, 0.0)


def _P(model: ModelSpec, c: float, lam: float) -> float:
    return model.d * lam * lam - c * lam + model.s


def build_bounds(
    model: ModelSpec,
    c: float,
    sigma: Optional[float] = None,
    r: Optional[float] = None,
) -> BoundPair:
    """Selects the constants and returns the upper/lower pair for speed c.

    ``sigma`` and ``r`` override the automatic choice; an override is taken
    as given, even when it violates the admissible range.
    """
    lambda1, lambda2 = analysis.predator_eigenvalues(model, c)
    f1, q0, q1 = model.f1, model.q0, model.q1

    if not analysis.at_critical_speed(model, c):
        beta = BETA_FRACTION * min(c, lambda1)
        eps = EPS_FRACTION * min(lambda1, lambda2 - lambda1)
        sigma_lb = max(1.0, f1 * q1 / (beta * (c - beta)))
        r_lb = max(
            1.0, -model.s * q1 / (_P(model, c, lambda1 + eps) * q0)
        )
        sigma = CONSTANT_MARGIN * sigma_lb if sigma is None else sigma
        r = CONSTANT_MARGIN * r_lb if r is None else r
        pair = BoundPair(
            case=BoundCase.SUPERCRITICAL,
            c=c,
            beta=beta,
            sigma=sigma,
            r=r,
            z1=-math.log(sigma) / beta,
            z2=-math.log(r) / eps,
            kink0=0.0,
            lam=lambda1,
            q0=q0,
            q1=q1,
            eps=eps,
        )
    else:
        lam = c / (2.0 * model.d)
        h = lam * math.e**2 / 2.0
        beta = BETA_FRACTION * min(c, lam)
        sigma_lb = max(
            math.exp(2.0 * beta / lam),
            f1 * h * q1 / ((c - beta) * (lam - beta) * beta * math.e),
        )
        r_lb = max(
            h * math.sqrt(2.0 / lam),
            4.0
            * model.s
            * h**2
            * q1
            / (model.d * q0)
            * (7.0 / (2.0 * math.e * lam)) ** 3.5,
        )
        sigma = CONSTANT_MARGIN * sigma_lb if sigma is None else sigma
        r = CONSTANT_MARGIN * r_lb if r is None else r
        pair = BoundPair(
            case=BoundCase.CRITICAL,
            c=c,
            beta=beta,
            sigma=sigma,
            r=r,
            z1=-math.log(sigma) / beta,
            z2=-((r / h) ** 2),
            kink0=-2.0 / lam,
            lam=lam,
            q0=q0,
            q1=q1,
            h_const=h,
        )
    logger.debug(
        "built bounds",
        case=pair.case.value,
        beta=pair.beta,
        sigma=pair.sigma,
        r=pair.r,
        z1=pair.z1,
        z2=pair.z2,
    )
    return pair


# ---------------------------------------------------------------------------
# verification


def wave_operator_u(
    model: ModelSpec, c: float, u: Array, du: Array, ddu: Array, v: Array
) -> Array:
    return ddu - c * du + model.f(u) * (model.p(u) - v)


def wave_operator_v(
    model: ModelSpec, c: float, u: Array, v: Array, dv: Array, ddv: Array
) -> Array:
    return model.d * ddv - c * dv + model.s * v * (1.0 - v / model.q(u))


@dataclasses.dataclass(frozen=True)
class InequalityCheck:
    name: str
    sign: int  # -1: expression <= 0 required, +1: expression >= 0
    worst: float
    location: float
    passed: bool


@dataclasses.dataclass(frozen=True)
class InequalityReport:
    checks: tuple[InequalityCheck, ...]
    ordering_ok: bool
    membership_ok: bool
    z_min: float
    z_max: float
    n_grid: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.ordering_ok and all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> InequalityCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "passed": self.passed,
            "ordering_ok": self.ordering_ok,
            "membership_ok": self.membership_ok,
            "z_min": self.z_min,
            "z_max": self.z_max,
            "n_grid": self.n_grid,
            "tol": self.tol,
        }
        for check in self.checks:
            out[f"{check.name}.worst"] = check.worst
            out[f"{check.name}.location"] = check.location
            out[f"{check.name}.passed"] = check.passed
        return out


def _check(
    name: str, sign: int, z: Array, values: Array, tol: float
) -> InequalityCheck:
    if len(values) == 0:
        return InequalityCheck(name, sign, 0.0, float("nan"), True)
    idx = int(np.argmax(values)) if sign < 0 else int(np.argmin(values))
    worst = float(values[idx])
    passed = worst <= tol if sign < 0 else worst >= -tol
    return InequalityCheck(name, sign, worst, float(z[idx]), passed)


def verify_bounds(
    model: ModelSpec,
    c: float,
    pair: BoundPair,
    z_min: float = -80.0,
    z_max: float = 40.0,
    n_grid: int = 100_000,
    tol: float = 1e-10,
) -> InequalityReport:
    z = np.linspace(z_min, z_max, n_grid)
    spacing = (z_max - z_min) / (n_grid - 1)
    keep = np.ones_like(z, dtype=bool)
    for kink in pair.kinks:
        keep &= np.abs(z - kink) > KINK_EXCLUSION * spacing
    zk = z[keep]

    uu = pair.u_upper(zk)
    ul, dul, ddul = (pair.u_lower(zk, k) for k in range(3))
    vu, dvu, ddvu = (pair.v_upper(zk, k) for k in range(3))
    vl, dvl, ddvl = (pair.v_lower(zk, k) for k in range(3))
    zero = np.zeros_like(zk)

    checks = (
        _check(
            "U(u_upper,v_lower)",
            -1,
            zk,
            wave_operator_u(model, c, uu, zero, zero, vl),
            tol,
        ),
        _check(
            "U(u_lower,v_upper)",
            +1,
            zk,
            wave_operator_u(model, c, ul, dul, ddul, vu),
            tol,
        ),
        _check(
            "V(u_upper,v_upper)",
            -1,
            zk,
            wave_operator_v(model, c, uu, vu, dvu, ddvu),
            tol,
        ),
        _check(
            "V(u_lower,v_lower)",
            +1,
            zk,
            wave_operator_v(model, c, ul, vl, dvl, ddvl),
            tol,
        ),
    )

    u_lo, u_hi = pair.u_lower(z), pair.u_upper(z)
    v_lo, v_hi = pair.v_lower(z), pair.v_upper(z)
    ordering_ok = bool(np.all(u_lo <= u_hi + 1e-12) and np.all(v_lo <= v_hi))
    membership_ok = bool(
        np.all((u_lo >= 0) & (u_hi <= 1))
        and np.all((v_lo >= 0) & (v_hi <= pair.q1 * (1 + 1e-12)))
    )
    report = InequalityReport(
        checks=checks,
        ordering_ok=ordering_ok,
        membership_ok=membership_ok,
        z_min=z_min,
        z_max=z_max,
        n_grid=n_grid,
        tol=tol,
    )
    logger.debug("verified bounds", passed=report.passed)
    return report


def kink_jumps(pair: BoundPair) -> dict[str, float]:
    """One-sided first derivatives at the three kinks."""
    jumps = {}
    for name, fn, kink in (
        ("u_lower", pair.u_lower, pair.z1),
        ("v_lower", pair.v_lower, pair.z2),
        ("v_upper", pair.v_upper, pair.kink0),
    ):
        jumps[f"{name}'-"] = float(fn(kink, 1, side=-1))
        jumps[f"{name}'+"] = float(fn(kink, 1, side=+1))
    return jumps


def kink_jump_check(pair: BoundPair) -> bool:
    jumps = kink_jumps(pair)
    u_ok = jumps["u_lower'-"] < jumps["u_lower'+"]
    # v_lower'(z2-) may underflow far left; its sign is that of the factor
    v_factor = float(pair._v_lower_factor(np.asarray(pair.z2), 1))
    v_lower_ok = v_factor < 0 and jumps["v_lower'+"] == 0.0
    v_upper_ok = jumps["v_upper'+"] < jumps["v_upper'-"]
    return bool(u_ok and v_lower_ok and v_upper_ok)


def sample_bounds(pair: BoundPair, z: Array) -> dict[str, Array]:
    z = np.asarray(z, dtype=float)
    return {
        "z": z,
        "u_lower": pair.u_lower(z),
        "u_upper": pair.u_upper(z),
        "v_lower": pair.v_lower(z),
        "v_upper": pair.v_upper(z),
    }
