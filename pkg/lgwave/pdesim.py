"""Method-of-lines simulation of the predator-prey system on an interval.

Second-order central differences in space with zero-flux ends, explicit
Euler in time. The front of an invasion is tracked by a level crossing of
one field, its speed is fitted by least squares, and late snapshots can be
resampled in the co-moving frame ``z = x + c t``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Any, Optional, Sequence

import numpy as np
from scipy import stats

from lgwave.errors import (
    NoCrossing,
    NotConverged,
    PreconditionError,
    StabilityError,
)
from lgwave.log import logger
from lgwave.model import ModelSpec
from lgwave.waveode import Profile, Provenance, profile_from_uv

CLAMP_TOL = 1e-12
REGION_TOL = 1e-6


class Boundary(str, enum.Enum):
    NEUMANN_ZERO_FLUX = "neumann"


@dataclasses.dataclass(frozen=True)
class SimConfig:
    x_min: float = -200.0
    x_max: float = 200.0
    dx: float = 0.2
    dt: Optional[float] = None
    t_end: float = 200.0
    snapshot_times: tuple[float, ...] = ()
    boundary: Boundary = Boundary.NEUMANN_ZERO_FLUX

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise PreconditionError("x_max must exceed x_min")
        if not self.dx > 0 or not self.t_end > 0:
            raise PreconditionError("dx and t_end must be positive")
        if self.dt is not None and not self.dt > 0:
            raise PreconditionError("dt must be positive")
        for t in self.snapshot_times:
            if not 0 <= t <= self.t_end:
                raise PreconditionError(f"snapshot time {t} not in [0, t_end]")

    @property
    def x(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.dx)) + 1
        return np.linspace(self.x_min, self.x_max, n)

    def dt_limit(self, d: float) -> float:
        return 0.95 * self.dx**2 / (2.0 * max(1.0, d))

    def n_steps(self, d: float) -> int:
        dt = self.dt if self.dt is not None else self.dt_limit(d)
        return int(math.ceil(self.t_end / dt - 1e-9))

    def step_size(self, d: float) -> float:
        """The time step actually used: t_end split into equal steps."""
        return self.t_end / self.n_steps(d)

    def times(self) -> tuple[float, ...]:
        if self.snapshot_times:
            return tuple(sorted(self.snapshot_times))
        times = np.linspace(self.t_end / 20, self.t_end, 20)
        return tuple(float(t) for t in times)


@dataclasses.dataclass(frozen=True, eq=False)
class Snapshot:
    t: float
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    mu: Optional[float] = None

    def field(self, name: str) -> np.ndarray:
        if name not in ("u", "v"):
            raise PreconditionError(f"unknown field {name!r}")
        return self.u if name == "u" else self.v


def default_initial_condition(
    config: SimConfig,
) -> tuple[np.ndarray, np.ndarray]:
    x = config.x
    u0 = np.ones_like(x)
    v0 = np.where(x > 100.0, 0.1, 0.0)
    return u0, v0


def _laplacian(field: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(field)
    # (left + right) first keeps the stencil mirror symmetric in roundoff
    out[1:-1] = (field[2:] + field[:-2]) - 2.0 * field[1:-1]
    out[0] = 2.0 * (field[1] - field[0])
    out[-1] = 2.0 * (field[-2] - field[-1])
    return out / (dx * dx)


def _check_region(
    u: np.ndarray, v: np.ndarray, q1: float, t: float
) -> None:
    for name, values, upper in (("u", u, 1.0), ("v", v, q1)):
        if not np.all(np.isfinite(values)):
            raise StabilityError(f"{name} is not finite at t={t:.6g}")
        low, high = float(values.min()), float(values.max())
        if low < -REGION_TOL or high > upper + REGION_TOL:
            raise StabilityError(
                f"{name} left [0, {upper:.6g}] at t={t:.6g} "
                f"(min {low:.3e}, max {high:.6g})"
            )


def run(
    model: ModelSpec,
    config: SimConfig,
    ic: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> list[Snapshot]:
    """Integrates to ``config.t_end``; snapshots at the nearest steps."""
    x = config.x
    if ic is None:
        ic = default_initial_condition(config)
    u = np.array(ic[0], dtype=float)
    v = np.array(ic[1], dtype=float)
    if u.shape != x.shape or v.shape != x.shape:
        raise PreconditionError("initial condition does not match the grid")
    q1 = model.q1
    _check_region(u, v, q1, 0.0)

    n_steps = config.n_steps(model.d)
    dt = config.step_size(model.d)
    limit = config.dt_limit(model.d)
    if dt > limit * (1 + 1e-12):
        raise StabilityError(
            f"time step {dt:.6g} above the stability limit {limit:.6g}"
        )
    wanted = {}
    for t in config.times():
        wanted.setdefault(int(round(t / dt)), t)
    logger.info(
        "simulate",
        n_nodes=len(x),
        n_steps=n_steps,
        dt=dt,
        n_snapshots=len(wanted),
    )

    snapshots: list[Snapshot] = []
    if 0 in wanted:
        snapshots.append(Snapshot(0.0, x, u.copy(), v.copy(), model.mu))
    d, s = model.d, model.s
    for step in range(1, n_steps + 1):
        du = _laplacian(u, config.dx) + model.f(u) * (model.p(u) - v)
        dv = d * _laplacian(v, config.dx) + s * v * (1.0 - v / model.q(u))
        u = u + dt * du
        v = v + dt * dv
        u[(u < 0) & (u > -CLAMP_TOL)] = 0.0
        v[(v < 0) & (v > -CLAMP_TOL)] = 0.0
        _check_region(u, v, q1, step * dt)
        if step in wanted:
            t = step * dt
            snapshots.append(Snapshot(t, x, u.copy(), v.copy(), model.mu))
            logger.debug("snapshot", t=t)
    return snapshots


def mirror(snapshot: Snapshot) -> Snapshot:
    return Snapshot(
        snapshot.t,
        -snapshot.x[::-1],
        snapshot.u[::-1],
        snapshot.v[::-1],
        snapshot.mu,
    )


def _default_level(snapshot: Snapshot, level: Optional[float]) -> float:
    if level is not None:
        return level
    if snapshot.mu is None:
        raise PreconditionError("level required, the snapshot carries no mu")
    return snapshot.mu / 2.0


def front_position(
    snapshot: Snapshot, level: Optional[float] = None, field: str = "v"
) -> float:
    """Leftmost x where the field crosses the level, linearly interpolated.

    The level defaults to ``mu / 2`` of the simulated model.
    """
    level = _default_level(snapshot, level)
    x = snapshot.x
    gap = snapshot.field(field) - level
    exact = np.flatnonzero(gap == 0)
    sign = np.sign(gap)
    crossing = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    candidates = []
    if len(exact):
        candidates.append(float(x[exact[0]]))
    if len(crossing):
        i = int(crossing[0])
        frac = gap[i] / (gap[i] - gap[i + 1])
        candidates.append(float(x[i] + frac * (x[i + 1] - x[i])))
    if not candidates:
        raise NoCrossing(f"{field} never crosses {level:.6g} at t={snapshot.t}")
    return min(candidates)


def estimate_spreading_speed(
    snapshots: Sequence[Snapshot],
    t_burn: float,
    level: Optional[float] = None,
    field: str = "v",
) -> tuple[float, float]:
    """Least-squares front speed after ``t_burn`` and the fit's r squared."""
    late = [snap for snap in snapshots if snap.t > t_burn]
    if len(late) < 5:
        raise PreconditionError(
            f"need at least 5 snapshots after t={t_burn}, got {len(late)}"
        )
    times = np.array([snap.t for snap in late])
    positions = np.array([front_position(snap, level, field) for snap in late])
    fit = stats.linregress(times, positions)
    speed = abs(float(fit.slope))
    logger.info("front speed", speed=speed, r_squared=fit.rvalue**2)
    return speed, float(fit.rvalue**2)


def extract_profile(
    snapshots: Sequence[Snapshot], speed: float, tol: float = 1e-2
) -> Profile:
    """Resamples the last snapshot in the frame ``z = x + speed t``.

    The previous snapshot, shifted into the same frame, must agree with it
    to ``tol`` in max norm on the overlap.
    """
    if len(snapshots) < 2:
        raise PreconditionError("need two snapshots to check stabilization")
    prev, last = snapshots[-2], snapshots[-1]
    z_last = last.x + speed * last.t
    z_prev = prev.x + speed * prev.t
    mask = (z_last >= z_prev[0]) & (z_last <= z_prev[-1])
    if not np.any(mask):
        raise NotConverged("snapshots do not overlap in the co-moving frame")
    z = z_last[mask]
    diff = max(
        float(np.max(np.abs(last.u[mask] - np.interp(z, z_prev, prev.u)))),
        float(np.max(np.abs(last.v[mask] - np.interp(z, z_prev, prev.v)))),
    )
    if diff >= tol:
        raise NotConverged(
            f"front shape still changing: {diff:.3e} >= {tol:.1e} "
            f"between t={prev.t:.6g} and t={last.t:.6g}"
        )
    return profile_from_uv(
        z_last, last.u, last.v, speed, Provenance.PDE_EXTRACTION
    )


def behind_front_state(
    snapshot: Snapshot, front: float, width: float = 50.0
) -> tuple[float, float]:
    """Mean (u, v) over ``[front + width, front + 2 width]``."""
    x = snapshot.x
    mask = (x >= front + width) & (x <= front + 2.0 * width)
    if not np.any(mask):
        raise PreconditionError("no nodes behind the front")
    return float(np.mean(snapshot.u[mask])), float(np.mean(snapshot.v[mask]))


def invariant_margins(
    snapshots: Sequence[Snapshot], model: ModelSpec
) -> dict[str, Any]:
    q1 = model.q1
    return {
        "min_u": min(float(s.u.min()) for s in snapshots),
        "max_u_excess": max(float(s.u.max()) - 1.0 for s in snapshots),
        "min_v": min(float(s.v.min()) for s in snapshots),
        "max_v_excess": max(float(s.v.max()) - q1 for s in snapshots),
    }
