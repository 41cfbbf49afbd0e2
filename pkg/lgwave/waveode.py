"""Traveling-wave profiles of the first-order wave system.

With ``w = u'`` and ``y = v'`` the profile equations read::

    u' = w
    w' = c w - f(u) (p(u) - v)
    v' = y
    y' = (c y - s v (1 - v / q(u))) / d

Two independent solvers are provided: :func:`shoot` follows the connecting
orbit backwards from the target equilibrium E until it lands on the
unstable manifold of ``e0 = (1, 0, 0, 0)``; :func:`monotone_iterate`
iterates the integral operator built from an upper/lower solution pair.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate, linalg, signal

from lgwave import analysis
from lgwave.bounds import BoundPair
from lgwave.errors import (
    BoundsFail,
    EscapeError,
    NoConvergence,
    OrderingError,
    PreconditionError,
    TruncationWarning,
    WindowError,
)
from lgwave.log import logger
from lgwave.model import ModelSpec

Array = Any

E0 = np.array([1.0, 0.0, 0.0, 0.0])
RESONANCE_TOL = 1e-8
MATCH_TOL = 1e-3
LAUNCH_FLOOR = 1e-8
PREY_LAUNCH_FLOOR = 1e-18
LAUNCH_CAP = 1e-3
SCAN_REFINEMENTS = 3


class Provenance(str, enum.Enum):
    SHOOTING = "shooting"
    MONOTONE_ITERATION = "monotone"
    PDE_EXTRACTION = "pde"


@dataclasses.dataclass(frozen=True, eq=False)
class Profile:
    """A wave orbit sampled on a strictly increasing z grid."""

    z: np.ndarray
    u: np.ndarray
    w: np.ndarray
    v: np.ndarray
    y: np.ndarray
    c: float
    provenance: Provenance

    def __len__(self) -> int:
        return len(self.z)

    @property
    def states(self) -> np.ndarray:
        return np.stack([self.u, self.w, self.v, self.y])

    def shifted(self, shift: float) -> Profile:
        return dataclasses.replace(self, z=self.z + shift)

    def window(self, z_lo: float, z_hi: float) -> Profile:
        mask = (self.z >= z_lo) & (self.z <= z_hi)
        return dataclasses.replace(
            self,
            z=self.z[mask],
            u=self.u[mask],
            w=self.w[mask],
            v=self.v[mask],
            y=self.y[mask],
        )

    def columns(self) -> dict[str, np.ndarray]:
        return {"z": self.z, "u": self.u, "w": self.w, "v": self.v, "y": self.y}


def profile_from_uv(
    z: Array, u: Array, v: Array, c: float, provenance: Provenance
) -> Profile:
    """Builds a profile, taking w and y from central differences."""
    z = np.asarray(z, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if len(z) > 1:
        w = np.gradient(u, z)
        y = np.gradient(v, z)
    else:
        w = np.zeros_like(u)
        y = np.zeros_like(v)
    return Profile(z, u, w, v, y, float(c), provenance)


# ---------------------------------------------------------------------------
# the vector field


def vector_field(model: ModelSpec, c: float, state: Array) -> np.ndarray:
    u, w, v, y = state
    return np.array(
        [
            w,
            c * w - model.f(u) * (model.p(u) - v),
            y,
            (c * y - model.s * v * (1.0 - v / model.q(u))) / model.d,
        ]
    )


def jacobian(model: ModelSpec, c: float, state: Array) -> np.ndarray:
    u, _, v, _ = (float(x) for x in state)
    f, df = float(model.f(u)), float(model.df(u))
    p, dp = float(model.p(u)), float(model.dp(u))
    q, dq = float(model.q(u)), float(model.dq(u))
    s, d = model.s, model.d
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-(df * (p - v) + f * dp), c, f, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [
                -s * v * v * dq / (d * q * q),
                0.0,
                -s * (1 - 2 * v / q) / d,
                c / d,
            ],
        ]
    )


def _normalize(vec: Array) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    return vec / np.linalg.norm(vec)


def unstable_direction(
    model: ModelSpec, c: float, gamma: Optional[float] = None
) -> np.ndarray:
    """The leading direction along which a wave leaves e0.

    The direction is signed so that ``v > 0`` and ``u < 1`` along it.
    ``gamma`` weights the prey mode when ``lambda1 > lambda3``.
    """
    ctx = analysis.wave_context(model, c)
    lam1, lam3 = ctx.lambda1, ctx.lambda3
    psi = ctx.psi(lam1)
    e1 = -np.array([1.0, lam1, psi, lam1 * psi])
    e3 = -np.array([1.0, lam3, 0.0, 0.0])
    if abs(lam1 - lam3) < RESONANCE_TOL:
        e4 = np.array([0.0, -ctx.f1 / (2 * lam1 - ctx.c), -1.0, -lam1])
        return _normalize(e1 - e4)
    if lam1 < lam3:
        return _normalize(e1)
    # e1 points to v < 0 here; the prey mode keeps u below 1
    gamma = 2.0 if gamma is None else gamma
    return _normalize(-e1 + gamma * e3)


def target_equilibrium(model: ModelSpec) -> tuple[str, np.ndarray]:
    eq = analysis.positive_equilibrium(model)
    if eq is not None:
        return "coexistence", np.array([eq[0], 0.0, eq[1], 0.0])
    return "prey_free", np.array([0.0, 0.0, model.mu, 0.0])


@dataclasses.dataclass(frozen=True)
class LaunchSection:
    """A closed curve ``E + r1 cos(t) b1 + r2 sin(t) b2`` in the stable
    subspace of E that every orbit tending to E crosses.

    For real stable rates ``mu_fast < mu_slow < 0`` the radii satisfy
    ``r_fast ~ r_slow ** (mu_fast / mu_slow)``, so orbits entering E along
    the slow direction spread over an O(1) range of t.
    """

    center: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    r1: float
    r2: float
    half: bool

    def point(self, theta: float) -> np.ndarray:
        return (
            self.center
            + self.r1 * math.cos(theta) * self.b1
            + self.r2 * math.sin(theta) * self.b2
        )

    def angles(self, n: int) -> np.ndarray:
        if self.half:
            return -math.pi / 2 + math.pi * (np.arange(n) + 0.5) / n
        return 2 * math.pi * np.arange(n) / n


def launch_section(
    model: ModelSpec,
    c: float,
    target: np.ndarray,
    prey_free: bool,
    delta: float = 1e-6,
) -> LaunchSection:
    """The launch curve around ``target``.

    At the prey-free state only the half with positive prey component is
    used. The slow radius is at least ``delta``.
    """
    eigvals, eigvecs = np.linalg.eig(jacobian(model, c, target))
    stable = [i for i in np.argsort(eigvals.real) if eigvals[i].real < 0]
    if len(stable) != 2:
        raise PreconditionError(
            f"target equilibrium has {len(stable)} stable directions, "
            "expected 2"
        )
    i, j = stable
    if abs(eigvals[i].imag) > 1e-12:
        vec = eigvecs[:, i] if eigvals[i].imag > 0 else eigvecs[:, j]
        return LaunchSection(
            center=target,
            b1=_normalize(vec.real),
            b2=_normalize(vec.imag),
            r1=delta,
            r2=delta,
            half=prey_free,
        )
    fast, slow = _normalize(eigvecs[:, i].real), _normalize(eigvecs[:, j].real)
    ratio = float(eigvals[i].real / eigvals[j].real)
    # u = 0 is invariant, so a fast prey mode keeps its relative accuracy
    prey_fast = prey_free and abs(fast[0]) > abs(slow[0])
    floor = PREY_LAUNCH_FLOOR if prey_fast else LAUNCH_FLOOR
    r_slow = min(max(delta, floor ** (1.0 / ratio)), LAUNCH_CAP)
    r_fast = max(r_slow**ratio, floor)
    if prey_fast:
        b1, r1, b2, r2 = fast, r_fast, slow, r_slow
    else:
        b1, r1, b2, r2 = slow, r_slow, fast, r_fast
    if prey_free and b1[0] < 0:
        b1 = -b1
    return LaunchSection(
        center=target, b1=b1, b2=b2, r1=r1, r2=r2, half=prey_free
    )


def _left_eigvec_lambda4(model: ModelSpec, c: float) -> tuple[Array, Array]:
    _, lam4 = analysis.prey_eigenvalues(model, c)
    f1, d = model.f1, model.d
    pc = d * lam4 * lam4 - c * lam4 + model.s
    l4 = d * f1 / pc
    left = np.array([lam4 - c, 1.0, (lam4 - c / d) * l4, l4])
    right = np.array([1.0, lam4, 0.0, 0.0])
    return left, right


@dataclasses.dataclass
class _Shot:
    theta: float
    outcome: int
    d_min: float
    end_state: np.ndarray
    end_z: float


def _shoot_once(
    model: ModelSpec,
    c: float,
    start: np.ndarray,
    z_span: float,
    rtol: float,
    atol: float,
    dense: bool = False,
) -> Any:
    q1 = model.q1

    def rhs(_: float, x: np.ndarray) -> np.ndarray:
        return -vector_field(model, c, x)

    def overshoot(_: float, x: np.ndarray) -> float:
        return x[0] - 1.0

    def u_negative(_: float, x: np.ndarray) -> float:
        return x[0]

    def v_negative(_: float, x: np.ndarray) -> float:
        return x[2]

    def v_high(_: float, x: np.ndarray) -> float:
        return x[2] - 1.1 * q1

    events = [overshoot, u_negative, v_negative, v_high]
    for event, direction in zip(events, (1, -1, -1, 1)):
        event.terminal = True  # type: ignore[attr-defined]
        event.direction = direction  # type: ignore[attr-defined]

    return integrate.solve_ivp(
        rhs,
        (0.0, z_span),
        start,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=events,
        dense_output=dense,
    )


def _classify(sol: Any) -> int:
    if sol.status == 1 and len(sol.t_events[0]) > 0:
        return 1
    return -1


def _bisect(
    run: Callable[[float], _Shot], lo: _Shot, hi: _Shot, max_bisections: int
) -> _Shot:
    for _ in range(max_bisections):
        mid = 0.5 * (lo.theta + hi.theta)
        if mid in (lo.theta, hi.theta):
            break
        shot = run(mid)
        if shot.outcome == lo.outcome:
            lo = shot
        else:
            hi = shot
    return min(lo, hi, key=lambda s: s.d_min)


def _brackets(scan: list[_Shot], wrap: bool) -> list[tuple[_Shot, _Shot]]:
    n = len(scan)
    brackets = []
    for i in range(n if wrap else n - 1):
        lo, hi = scan[i], scan[(i + 1) % n]
        if lo.outcome == hi.outcome:
            continue
        if hi.theta < lo.theta:
            hi = dataclasses.replace(hi, theta=hi.theta + 2 * math.pi)
        brackets.append((lo, hi))
    brackets.sort(key=lambda b: min(b[0].d_min, b[1].d_min))
    return brackets


def shoot(
    model: ModelSpec,
    c: float,
    delta: float = 1e-6,
    z_span: float = 400.0,
    step_tol: float = 1e-10,
    *,
    n_angles: int = 64,
    tail_tol: float = 1e-4,
    spacing: float = 0.01,
    max_bisections: int = 60,
    atol: float = 1e-13,
) -> Profile:
    """Computes the wave connecting e0 to the target equilibrium.

    Launch points on the :class:`LaunchSection` around E are integrated in
    decreasing z. The launch angle is bisected across every neighbouring
    pair of launches of which exactly one overshoots ``u = 1``, until an
    orbit passes within ``tail_tol`` of e0. Without such a pair the scan is
    refined up to ``SCAN_REFINEMENTS`` times. Both ends are continued with
    the linearizations at e0 and E down to amplitude ``delta``.
    """
    ctx = analysis.wave_context(model, c)
    name, target = target_equilibrium(model)
    section = launch_section(model, c, target, name == "prey_free", delta)
    atol = min(atol, 1e-4 * min(section.r1, section.r2))

    def run(theta: float) -> _Shot:
        sol = _shoot_once(
            model, c, section.point(theta), z_span, step_tol, atol
        )
        dist = np.max(np.abs(sol.y - E0[:, None]), axis=0)
        return _Shot(
            theta=float(theta),
            outcome=_classify(sol),
            d_min=float(dist.min()),
            end_state=sol.y[:, -1],
            end_z=-float(sol.t[-1]),
        )

    best: Optional[_Shot] = None
    closest: Optional[_Shot] = None
    n = n_angles
    for _ in range(SCAN_REFINEMENTS + 1):
        scan = [run(t) for t in section.angles(n)]
        logger.debug(
            "shoot scan",
            target=name,
            n_angles=n,
            outcomes="".join("+" if s.outcome > 0 else "-" for s in scan),
        )
        for lo, hi in _brackets(scan, wrap=not section.half):
            candidate = _bisect(run, lo, hi, max_bisections)
            logger.debug(
                "shoot bracket", theta=candidate.theta, d_min=candidate.d_min
            )
            if closest is None or candidate.d_min < closest.d_min:
                closest = candidate
            if candidate.d_min < tail_tol:
                best = candidate
                break
        if best is not None:
            break
        nearest = min(scan, key=lambda s: s.d_min)
        if closest is None or nearest.d_min < closest.d_min:
            closest = nearest
        n *= 2

    if best is None:
        assert closest is not None
        raise EscapeError(
            f"no orbit from {name} reaches e0 (closest {closest.d_min:.3e})",
            z=closest.end_z,
            state=[float(x) for x in closest.end_state],
        )

    launch = section.point(best.theta)
    sol = _shoot_once(model, c, launch, z_span, step_tol, atol, dense=True)
    s_grid = np.arange(0.0, sol.t[-1], spacing)
    x = sol.sol(s_grid)
    dist = np.max(np.abs(x - E0[:, None]), axis=0)
    nearest_index = int(np.argmin(dist))
    landed = np.flatnonzero(dist[: nearest_index + 1] <= tail_tol)
    n_cut = int(landed[0]) if len(landed) else nearest_index
    x = x[:, : n_cut + 1]

    tail = _linear_tail(model, c, x[:, -1], spacing, delta, z_span)
    approach = _stable_tail(model, c, target, launch, spacing, delta, z_span)
    states = np.concatenate(
        [np.concatenate([x, tail], axis=1)[:, ::-1], approach], axis=1
    )
    z = spacing * np.arange(states.shape[1])

    profile = Profile(
        z=z,
        u=states[0],
        w=states[1],
        v=states[2],
        y=states[3],
        c=float(c),
        provenance=Provenance.SHOOTING,
    )
    profile = translate_profile(profile)
    _log_positivity(profile, model)
    logger.info(
        "shoot landed",
        target=name,
        c=ctx.c,
        theta=best.theta,
        d_min=best.d_min,
        n_points=len(profile),
    )
    return profile


def _stable_tail(
    model: ModelSpec,
    c: float,
    target: np.ndarray,
    x_launch: np.ndarray,
    spacing: float,
    delta: float,
    z_span: float,
) -> np.ndarray:
    """Continues the orbit to the right along the stable subspace of E."""
    jt = jacobian(model, c, target)
    eigvals, eigvecs = np.linalg.eig(jt)
    inverse = np.linalg.inv(eigvecs)
    stable = eigvals.real < 0
    step = linalg.expm(jt * spacing)

    def project(dev: np.ndarray) -> np.ndarray:
        return np.real(eigvecs @ np.where(stable, inverse @ dev, 0.0))

    dev = project(x_launch - target)
    points = []
    for _ in range(int(z_span / spacing)):
        if np.max(np.abs(dev)) <= delta:
            break
        dev = project(step @ dev)
        points.append(target + dev)
    if not points:
        return np.zeros((4, 0))
    return np.array(points).T


def _linear_tail(
    model: ModelSpec,
    c: float,
    x_land: np.ndarray,
    spacing: float,
    delta: float,
    z_span: float,
) -> np.ndarray:
    """Continues the orbit to the left along the unstable subspace of e0."""
    j0 = jacobian(model, c, E0)
    step = linalg.expm(-j0 * spacing)
    left, right = _left_eigvec_lambda4(model, c)
    norm = float(left @ right)

    def project(dev: np.ndarray) -> np.ndarray:
        return dev - (left @ dev) / norm * right

    dev = project(x_land - E0)
    points = []
    for _ in range(int(z_span / spacing)):
        if np.max(np.abs(dev)) <= delta:
            break
        dev = project(step @ dev)
        points.append(E0 + dev)
    if not points:
        return np.zeros((4, 0))
    return np.array(points).T


def _log_positivity(profile: Profile, model: ModelSpec) -> None:
    bad_u = np.sum((profile.u <= 0) | (profile.u >= 1))
    bad_v = np.sum((profile.v <= 0) | (profile.v >= model.q1))
    if bad_u or bad_v:
        logger.warning(
            "profile leaves the invariant box",
            bad_u=int(bad_u),
            bad_v=int(bad_v),
            provenance=profile.provenance.value,
        )


# ---------------------------------------------------------------------------
# translation and comparison


def translate_profile(profile: Profile) -> Profile:
    """Shifts z so that u crosses ``(1 + u_right) / 2`` at z = 0."""
    level = 0.5 * (1.0 + profile.u[-1])
    below = np.flatnonzero(profile.u <= level)
    if len(below) == 0 or below[0] == 0:
        return profile
    i = int(below[0])
    u0, u1 = profile.u[i - 1], profile.u[i]
    z0, z1 = profile.z[i - 1], profile.z[i]
    frac = (u0 - level) / (u0 - u1) if u0 != u1 else 0.0
    return profile.shifted(-(z0 + frac * (z1 - z0)))


def align_profiles(a: Profile, b: Profile) -> tuple[Profile, Profile]:
    return translate_profile(a), translate_profile(b)


def profile_distance(
    a: Profile, b: Profile, fields: Sequence[str] = ("u", "v")
) -> float:
    """Max-norm difference of two profiles on their overlap after alignment."""
    a, b = align_profiles(a, b)
    lo, hi = max(a.z[0], b.z[0]), min(a.z[-1], b.z[-1])
    mask = (a.z >= lo) & (a.z <= hi)
    if not np.any(mask):
        raise PreconditionError("profiles do not overlap")
    worst = 0.0
    for name in fields:
        values_b = np.interp(a.z[mask], b.z, getattr(b, name))
        worst = max(
            worst, float(np.max(np.abs(getattr(a, name)[mask] - values_b)))
        )
    return worst


def ode_residual(profile: Profile, model: ModelSpec) -> float:
    """Max residual of the second-order wave equations on interior points."""
    z, u, v, c = profile.z, profile.u, profile.v, profile.c
    if len(z) < 3:
        return 0.0
    h1 = z[1:-1] - z[:-2]
    h2 = z[2:] - z[1:-1]
    denom = h1 * h2 * (h1 + h2)

    def derivatives(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        first = (h1**2 * x[2:] - h2**2 * x[:-2] + (h2**2 - h1**2) * x[1:-1])
        second = 2.0 * (h1 * x[2:] - (h1 + h2) * x[1:-1] + h2 * x[:-2])
        return first / denom, second / denom

    du, ddu = derivatives(u)
    dv, ddv = derivatives(v)
    um, vm = u[1:-1], v[1:-1]
    res_u = ddu - c * du + model.f(um) * (model.p(um) - vm)
    res_v = (
        model.d * ddv - c * dv + model.s * vm * (1.0 - vm / model.q(um))
    )
    return float(max(np.max(np.abs(res_u)), np.max(np.abs(res_v))))


def tail_alignment(
    profile: Profile, model: ModelSpec, gamma: Optional[float] = None
) -> float:
    """|cos| of the angle between the left-end deviation and the leading
    unstable direction of e0."""
    dev = profile.states[:, 0] - E0
    norm = np.linalg.norm(dev)
    if norm == 0:
        return 1.0
    direction = unstable_direction(model, profile.c, gamma)
    return float(abs(dev @ direction) / norm)


# ---------------------------------------------------------------------------
# monotone iteration


def _kernel_weights(kappa: float, h: float) -> tuple[list[float], list[float]]:
    a = math.exp(-kappa * h)
    a0 = -math.expm1(-kappa * h) / kappa
    a1 = (1.0 - a - kappa * h * a) / kappa**2
    return [a0 - a1 / h, a1 / h], [1.0, -a]


def _one_sided(values: np.ndarray, kappa: float, h: float) -> np.ndarray:
    """``int_{-inf}^z e^{-kappa (z - t)} F(t) dt`` with F linear between
    nodes and constant beyond the left end."""
    b, a = _kernel_weights(kappa, h)
    zi = signal.lfiltic(b, a, y=[values[0] / kappa], x=[values[0]])
    out, _ = signal.lfilter(b, a, values, zi=zi)
    return out


def _convolve(
    values: np.ndarray, nu_minus: float, nu_plus: float, h: float
) -> np.ndarray:
    left = _one_sided(values, -nu_minus, h)
    right = _one_sided(values[::-1], nu_plus, h)[::-1]
    return left + right


def apply_operator(
    model: ModelSpec,
    ctx: analysis.WaveContext,
    h: float,
    u: np.ndarray,
    v: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One application of ``P = (P1, P2)`` on a uniform grid of spacing h."""
    tau = ctx.tau
    big_f = tau * u + model.f(u) * (model.p(u) - v)
    big_g = tau * v + model.s * v * (1.0 - v / model.q(u))
    p1 = _convolve(big_f, ctx.nu1_minus, ctx.nu1_plus, h) / (
        ctx.nu1_plus - ctx.nu1_minus
    )
    p2 = _convolve(big_g, ctx.nu2_minus, ctx.nu2_plus, h) / (
        model.d * (ctx.nu2_plus - ctx.nu2_minus)
    )
    return p1, p2


def monotone_grid(
    pair: BoundPair, lambda1: float, spacing: float
) -> np.ndarray:
    z_lo = min(pair.z1, pair.z2) - 60.0 / pair.beta
    z_hi = 60.0 / lambda1
    n = int(math.ceil((z_hi - z_lo) / spacing)) + 1
    return z_lo + spacing * np.arange(n)


def monotone_iterate(
    model: ModelSpec,
    c: float,
    pair: BoundPair,
    n_max: int = 50_000,
    conv_tol: float = 1e-9,
    spacing: float = 0.02,
) -> Profile:
    """Iterates the integral operator from the upper/lower pair.

    The coupled sweeps tighten the bracket monotonically. If the bracket
    stops shrinking before it closes, the iteration continues as ``x <-
    P(x)`` from the midpoint, clipped into the final bracket.
    """
    ctx = analysis.wave_context(model, c)
    z = monotone_grid(pair, ctx.lambda1, spacing)
    h = float(z[1] - z[0])

    u_hi, u_lo = pair.u_upper(z), pair.u_lower(z)
    v_hi, v_lo = pair.v_upper(z), pair.v_lower(z)
    if np.any(u_lo > u_hi + 1e-12) or np.any(v_lo > v_hi + 1e-12):
        raise OrderingError("lower solution exceeds upper solution at sweep 0")

    sweeps = 0
    gap = prev_gap = math.inf
    while sweeps < n_max:
        new_u_hi, _ = apply_operator(model, ctx, h, u_hi, v_lo)
        new_u_lo, _ = apply_operator(model, ctx, h, u_lo, v_hi)
        _, new_v_hi = apply_operator(model, ctx, h, u_hi, v_hi)
        _, new_v_lo = apply_operator(model, ctx, h, u_lo, v_lo)
        u_hi = np.minimum(u_hi, new_u_hi)
        u_lo = np.maximum(u_lo, new_u_lo)
        v_hi = np.minimum(v_hi, new_v_hi)
        v_lo = np.maximum(v_lo, new_v_lo)
        sweeps += 1
        gap = float(max(np.max(u_hi - u_lo), np.max(v_hi - v_lo)))
        if gap < conv_tol or prev_gap - gap <= conv_tol:
            break
        prev_gap = gap
    logger.debug("monotone bracket", sweeps=sweeps, gap=gap)

    u = 0.5 * (u_hi + u_lo)
    v = 0.5 * (v_hi + v_lo)
    if gap >= conv_tol:
        change = math.inf
        while sweeps < n_max:
            new_u, new_v = apply_operator(model, ctx, h, u, v)
            new_u = np.clip(new_u, u_lo, u_hi)
            new_v = np.clip(new_v, v_lo, v_hi)
            change = float(
                max(np.max(np.abs(new_u - u)), np.max(np.abs(new_v - v)))
            )
            u, v = new_u, new_v
            sweeps += 1
            if change < conv_tol:
                break
        if change >= conv_tol:
            raise NoConvergence(
                f"monotone iteration stopped after {sweeps} sweeps", change
            )
    logger.info("monotone iteration converged", sweeps=sweeps, c=c)

    _warn_truncation(z, u, v, h)
    profile = profile_from_uv(z, u, v, c, Provenance.MONOTONE_ITERATION)
    _log_positivity(profile, model)
    return profile


def _warn_truncation(
    z: np.ndarray, u: np.ndarray, v: np.ndarray, h: float
) -> None:
    left = max(abs(u[0] - 1.0), abs(v[0]))
    right = max(abs(u[-1] - u[-2]), abs(v[-1] - v[-2])) / h
    if left > 1e-6 or right > 1e-6:
        message = (
            f"profile on [{z[0]:.4g}, {z[-1]:.4g}] not settled at the ends "
            f"(left {left:.2e}, right slope {right:.2e})"
        )
        warnings.warn(message, TruncationWarning)


# ---------------------------------------------------------------------------
# profile diagnostics


@dataclasses.dataclass(frozen=True)
class DEstimateReport:
    K: float
    w_bounds_ok: bool
    y_bounds_ok: bool
    set_D_ok: bool
    box_ok: bool
    margins: dict[str, float]
    locations: dict[str, float]

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "K": self.K,
            "w_bounds_ok": self.w_bounds_ok,
            "y_bounds_ok": self.y_bounds_ok,
            "set_D_ok": self.set_D_ok,
            "box_ok": self.box_ok,
        }
        for key, value in self.margins.items():
            out[f"margin.{key}"] = value
            out[f"location.{key}"] = self.locations[key]
        return out


def check_derivative_estimates(
    profile: Profile, model: ModelSpec, max_doublings: int = 20
) -> DEstimateReport:
    """Checks the derivative bounds of the invariant set D.

    ``-K f(u) < w < K f(u)``, ``-s q1/(c q0) v <= y <= c/(2d) v`` and the
    widened D constants ``-2 s q1/(c q0)`` and ``c/d``.
    """
    c, d, s = profile.c, model.d, model.s
    q0, q1 = model.q0, model.q1
    z, u, w, v, y = profile.z, profile.u, profile.w, profile.v, profile.y
    f = model.f(u)

    K = 2.0 * q1 / c
    for _ in range(max_doublings):
        if np.all((-K * f < w) & (w < K * f)):
            break
        K *= 2.0
    margin_w = K * f - np.abs(w)
    w_bounds_ok = bool(np.all(margin_w > 0))
    if not w_bounds_ok:
        i = int(np.argmin(margin_w))
        raise BoundsFail(
            f"|w| < K f(u) fails for K={K:.3e} at z={z[i]:.6g}"
        )

    slack = 1e-8 * np.abs(v)
    low_y = y + s * q1 / (c * q0) * v
    high_y = c / (2.0 * d) * v - y
    lowD = y + 2.0 * s * q1 / (c * q0) * v
    highD = c / d * v - y
    y_bounds_ok = bool(np.all(low_y >= -slack) and np.all(high_y >= -slack))
    set_D_ok = bool(np.all(lowD > 0) and np.all(highD > 0))
    box_ok = bool(
        np.all((u > 0) & (u < 1)) and np.all((v > 0) & (v < q1))
    )

    margins, locations = {}, {}
    for key, values in (
        ("w", margin_w),
        ("y_lower", low_y),
        ("y_upper", high_y),
        ("D_y_lower", lowD),
        ("D_y_upper", highD),
    ):
        i = int(np.argmin(values))
        margins[key] = float(values[i])
        locations[key] = float(z[i])

    return DEstimateReport(
        K=K,
        w_bounds_ok=w_bounds_ok,
        y_bounds_ok=y_bounds_ok,
        set_D_ok=set_D_ok,
        box_ok=box_ok,
        margins=margins,
        locations=locations,
    )


class AsymptoticRates(NamedTuple):
    rate_v: float
    rate_u: float
    lambda1: float
    lambda_candidates: tuple[float, float]


def asymptotic_rates(
    profile: Profile,
    model: ModelSpec,
    z_window: Optional[tuple[float, float]] = None,
) -> AsymptoticRates:
    """Mean ratios ``y/v`` and ``w/(u-1)`` over a window at the left end."""
    if z_window is None:
        z_window = (float(profile.z[0]), float(profile.z[0]) + 10.0)
    mask = (profile.z >= z_window[0]) & (profile.z <= z_window[1])
    if np.count_nonzero(mask) < 2:
        raise WindowError(f"window {z_window} holds fewer than two points")
    u = profile.u[mask]
    if np.any(u <= 1.0 - 1e-3):
        raise WindowError(
            f"window {z_window} reaches u <= 1 - 1e-3 (min u {u.min():.6g})"
        )
    rate_v = float(np.mean(profile.y[mask] / profile.v[mask]))
    rate_u = float(np.mean(profile.w[mask] / (u - 1.0)))
    ctx = analysis.wave_context(model, profile.c)
    return AsymptoticRates(
        rate_v=rate_v,
        rate_u=rate_u,
        lambda1=ctx.lambda1,
        lambda_candidates=(ctx.lambda1, ctx.lambda3),
    )


class TailKind(str, enum.Enum):
    A = "A"
    B = "B"
    NEITHER = "Neither"


@dataclasses.dataclass(frozen=True)
class TailClass:
    kind: TailKind
    z_v: Optional[float]
    w_negative: bool
    diagnostic: str = ""


def classify_tail(
    profile: Profile, model: ModelSpec, settle_tol: float = 1e-5
) -> TailClass:
    """Monotonicity class of the predator profile of a prey-free wave.

    Points within ``settle_tol`` of (0, mu) at the right end are left out;
    their signs are set by the launch perturbation.
    """
    mu = model.mu
    w_negative = bool(np.all(profile.w < 0))
    _, matched = wave_limit(profile, model)
    if matched != "prey_free":
        return TailClass(
            TailKind.NEITHER,
            None,
            w_negative,
            f"profile converges to {matched or 'no equilibrium'}",
        )

    dist = np.maximum(np.abs(profile.u), np.abs(profile.v - mu))
    outside = np.flatnonzero(dist > settle_tol)
    end = int(outside[-1]) + 1 if len(outside) else len(profile)
    z, v, y = profile.z[:end], profile.v[:end], profile.y[:end]

    if np.all(v < mu - 1e-8) and np.all(y > 0):
        return TailClass(TailKind.A, None, w_negative)

    above = np.flatnonzero(v >= mu)
    if len(above):
        i = int(above[0])
        if np.all(y[:i] > 0) and np.all(v[i + 1 :] > mu):
            if i > 0 and v[i] != v[i - 1]:
                frac = (mu - v[i - 1]) / (v[i] - v[i - 1])
                z_v = float(z[i - 1] + frac * (z[i] - z[i - 1]))
            else:
                z_v = float(z[i])
            return TailClass(TailKind.B, z_v, w_negative)
    return TailClass(
        TailKind.NEITHER, None, w_negative, "v is neither in A nor in B"
    )


def wave_limit(
    profile: Profile, model: ModelSpec, tail_fraction: float = 0.05
) -> tuple[tuple[float, float], Optional[str]]:
    n = len(profile)
    k = max(1, int(math.ceil(n * tail_fraction)))
    point = (float(np.mean(profile.u[-k:])), float(np.mean(profile.v[-k:])))
    for name, (u_eq, v_eq) in analysis.equilibria(model).named().items():
        if max(abs(point[0] - u_eq), abs(point[1] - v_eq)) <= MATCH_TOL:
            return point, name
    return point, None
