"""The subcommands, one Node each."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional, Sequence

import numpy as np

from lgwave import analysis, bounds, io, lyapunov, pdesim, utils, waveode
from lgwave.config import FIGURES, ModelBlock, RunConfig
from lgwave.errors import (
    EscapeError,
    NoConvergence,
    NoCrossing,
    NotConverged,
    PreconditionError,
    WindowError,
)
from lgwave.model import ModelKind, ModelSpec, check_assumptions
from lgwave.node import Node, Summary

WRITER_THREADS = 4
BEHIND_FRONT_TOL = 1e-2
FADE_TOL = 1e-2
PROFILE_MATCH_TOL = 1e-2
RESIDUAL_TOL = 1e-4


def _try(fn: Any, *args: Any) -> Any:
    try:
        return fn(*args)
    except PreconditionError:
        return None


class Analyze(Node):
    """Equilibria, thresholds and, with ``wave.c``, the spectral data."""

    subcommand = "analyze"
    description = "Equilibria, thresholds and conditions of a model."

    def _run(self) -> Summary:
        model = self.model
        eqs = analysis.equilibria(model)
        summary: Summary = {
            "passed": True,
            "kind": model.kind.value,
            "c_star": analysis.critical_speed(model),
            "assumptions_ok": check_assumptions(model).ok,
            "preyfree_state_stable": analysis.preyfree_state_stable(model),
            "condition_P": _try(analysis.check_condition_P, model),
            "preyfree_condition": _try(analysis.preyfree_condition, model),
        }
        for name, point in eqs.named().items():
            summary[f"equilibrium.{name}"] = list(point)
        if eqs.positive is not None:
            summary["u_star"], summary["v_star"] = eqs.positive
        if model.kind is ModelKind.HOLLING_II:
            summary["abar"] = analysis.holling_threshold_abar(
                model.e1, model.mu
            )
        elif model.kind is ModelKind.LOTKA_VOLTERRA:
            summary["abar"] = analysis.lv_threshold_abar(model.mu)
            summary["lv_cubic_root"] = analysis.lv_cubic_root(model.mu)

        c = self.config.wave.c
        if c is not None:
            ctx = analysis.wave_context(model, c)
            summary["wave"] = {
                f.name: getattr(ctx, f.name) for f in dataclasses.fields(ctx)
            }
            summary["wave"]["critical"] = ctx.critical
        self.logger.info("analyzed model", kind=model.kind.value)
        return summary


class AtSpeed(Node):
    """A node working at the wave speed ``wave.c``."""

    @classmethod
    def create_key(cls, config: RunConfig) -> str:
        assert config.wave.c is not None
        c = utils.short_number(config.wave.c)
        return f"{super().create_key(config)}_c{c}"

    @property
    def c(self) -> float:
        assert self.config.wave.c is not None
        return self.config.wave.c

    def shoot(self) -> waveode.Profile:
        wave = self.config.wave
        return waveode.shoot(
            self.model,
            self.c,
            delta=wave.delta,
            z_span=wave.z_span,
            step_tol=wave.step_tol,
            spacing=wave.spacing,
        )


class Bounds(AtSpeed):
    """Builds the upper/lower pair for ``wave.c`` and checks it."""

    subcommand = "bounds"
    description = "Upper/lower solutions and their inequality checks."

    def _run(self) -> Summary:
        model, wave = self.model, self.config.wave
        pair = bounds.build_bounds(model, self.c, sigma=wave.sigma, r=wave.r)
        report = bounds.verify_bounds(
            model,
            self.c,
            pair,
            z_min=wave.z_min,
            z_max=wave.z_max,
            n_grid=wave.n_grid,
            tol=wave.tol,
        )
        kinks_ok = bounds.kink_jump_check(pair)

        z = np.linspace(wave.z_min, wave.z_max, 2001)
        samples = bounds.sample_bounds(pair, z)
        if self.wants("csv"):
            io.write_csv(self.path("bounds.csv"), samples)
        if self.wants("svg"):
            io.write_svg(
                self.path("bounds.svg"),
                f"upper/lower solutions, c={self.c:g}",
                z,
                {k: v for k, v in samples.items() if k != "z"},
            )

        summary: Summary = {
            "c": self.c,
            "case": pair.case.value,
            "beta": pair.beta,
            "sigma": pair.sigma,
            "r": pair.r,
            "z1": pair.z1,
            "z2": pair.z2,
            "kink0": pair.kink0,
        }
        summary.update(report.as_dict())
        summary["kink_jumps"] = bounds.kink_jumps(pair)
        summary["kink_jumps_ok"] = kinks_ok
        summary["passed"] = report.passed and kinks_ok
        if not summary["passed"]:
            failed = [c.name for c in report.checks if not c.passed]
            self.logger.warning("bounds check failed", failed=failed)
        return summary


def describe_profile(
    profile: waveode.Profile,
    model: ModelSpec,
    gamma: Optional[float] = None,
) -> Summary:
    """Limits, residual, derivative estimates, rates and tail class."""
    point, matched = waveode.wave_limit(profile, model)
    out: Summary = {
        "provenance": profile.provenance.value,
        "n_points": len(profile),
        "z_min": float(profile.z[0]),
        "z_max": float(profile.z[-1]),
        "limit": list(point),
        "limit_matched": matched or "none",
        "ode_residual": waveode.ode_residual(profile, model),
    }
    out.update(
        {
            f"estimates.{k}": v
            for k, v in waveode.check_derivative_estimates(
                profile, model
            ).as_dict().items()
        }
    )
    try:
        rates = waveode.asymptotic_rates(profile, model)
        out["rate_v"] = rates.rate_v
        out["rate_u"] = rates.rate_u
        out["lambda1"] = rates.lambda1
        out["lambda_candidates"] = list(rates.lambda_candidates)
    except WindowError as e:
        out["rates"] = f"skipped: {e}"
    if waveode.target_equilibrium(model)[0] == "prey_free":
        tail = waveode.classify_tail(profile, model)
        out["tail_class"] = tail.kind.value
        out["tail_z_v"] = tail.z_v
        out["tail_w_negative"] = tail.w_negative
    if profile.provenance is waveode.Provenance.SHOOTING:
        out["tail_alignment"] = waveode.tail_alignment(profile, model, gamma)
    return out


class Wave(AtSpeed):
    """Computes the wave profile at ``wave.c``."""

    subcommand = "wave"
    description = "Wave profile by shooting and/or monotone iteration."

    def compute(self) -> dict[str, waveode.Profile]:
        model, wave = self.model, self.config.wave
        profiles = {}
        if wave.method in ("shoot", "both"):
            profiles["shoot"] = self.shoot()
        if wave.method in ("monotone", "both"):
            pair = bounds.build_bounds(
                model, self.c, sigma=wave.sigma, r=wave.r
            )
            profiles["monotone"] = waveode.monotone_iterate(
                model,
                self.c,
                pair,
                n_max=wave.n_max,
                conv_tol=wave.conv_tol,
                spacing=wave.spacing,
            )
        return profiles

    def _run(self) -> Summary:
        model = self.model
        target = waveode.target_equilibrium(model)[0]
        profiles = self.compute()
        summary: Summary = {"c": self.c, "passed": True}
        for name, profile in profiles.items():
            described = describe_profile(
                profile, model, self.config.wave.gamma
            )
            described["passed"] = (
                described["limit_matched"] == target
                and described["ode_residual"] < RESIDUAL_TOL
            )
            summary[name] = described
            summary["passed"] = summary["passed"] and described["passed"]
            if self.wants("csv"):
                io.write_csv(
                    self.path(f"profile_{name}.csv"), profile.columns()
                )
            if self.wants("svg"):
                io.write_svg(
                    self.path(f"profile_{name}.svg"),
                    f"{name} profile, c={profile.c:g}",
                    profile.z,
                    {"u": profile.u, "v": profile.v},
                )
        if len(profiles) == 2:
            distance = waveode.profile_distance(
                profiles["shoot"], profiles["monotone"]
            )
            summary["distance"] = distance
            summary["passed"] = (
                summary["passed"] and distance < PROFILE_MATCH_TOL
            )
        if not summary["passed"]:
            self.logger.warning("wave check failed", target=target)
        return summary


def select_kind(model: ModelSpec, name: str) -> lyapunov.LyapunovKind:
    if name == "auto":
        return lyapunov.auto_kind(model)
    if name == "coexistence":
        return lyapunov.LyapunovKind.coexistence()
    if name == "preyfree":
        return lyapunov.LyapunovKind.prey_free(model)
    return lyapunov.LyapunovKind.novel(model)


class Lyapunov(AtSpeed):
    """Shoots the wave at ``wave.c`` and checks the Lyapunov descent."""

    subcommand = "lyapunov"
    description = "Lyapunov function values and descent along the wave."

    def _run(self) -> Summary:
        model = self.model
        kind = select_kind(model, self.config.wave.lyapunov)
        profile = self.shoot()
        report = lyapunov.verify_descent(kind, model, profile)
        value, prime = lyapunov.lyapunov_along(kind, model, profile)
        if self.wants("csv"):
            io.write_csv(
                self.path("lyapunov.csv"),
                {"z": profile.z, "L": value, "L_prime": prime},
            )
        if self.wants("svg"):
            io.write_svg(
                self.path("lyapunov.svg"),
                f"{kind.family.value} Lyapunov function, c={self.c:g}",
                profile.z,
                {"L": value, "L'": prime},
            )
        summary: Summary = {"c": self.c}
        summary.update(report.as_dict())
        return summary


# ---------------------------------------------------------------------------
# simulation


def sim_config(
    config: RunConfig, default_times: Sequence[float] = ()
) -> pdesim.SimConfig:
    sim = config.sim
    return pdesim.SimConfig(
        x_min=sim.x_min,
        x_max=sim.x_max,
        dx=sim.dx,
        dt=sim.dt,
        t_end=sim.t_end,
        snapshot_times=tuple(sim.snapshot_times) or tuple(default_times),
    )


def write_snapshots(
    node: Node, snapshots: Sequence[pdesim.Snapshot], q1: float
) -> list[str]:
    """Writes the snapshot files on a thread pool; names follow the order."""
    y_range = (0.0, max(1.0, q1))

    def write(item: tuple[int, pdesim.Snapshot]) -> str:
        i, snap = item
        stem = f"snapshot_{i:03d}_t{utils.short_number(snap.t)}"
        if node.wants("csv"):
            io.write_csv(
                node.path(f"{stem}.csv"),
                {"x": snap.x, "u": snap.u, "v": snap.v},
            )
        if node.wants("svg"):
            io.write_svg(
                node.path(f"{stem}.svg"),
                f"t = {snap.t:g}",
                snap.x,
                {"u": snap.u, "v": snap.v},
                x_label="x",
                y_range=y_range,
            )
        return stem

    with ThreadPoolExecutor(max_workers=WRITER_THREADS) as pool:
        return list(pool.map(write, enumerate(snapshots)))


def front_summary(
    snapshots: Sequence[pdesim.Snapshot],
    model: ModelSpec,
    config: RunConfig,
) -> Summary:
    sim = config.sim
    level = sim.level if sim.level is not None else model.mu / 2.0
    out: Summary = {
        "c_star": analysis.critical_speed(model),
        "level": level,
        "field": sim.field,
    }
    try:
        speed, r_squared = pdesim.estimate_spreading_speed(
            snapshots, sim.t_burn, level, sim.field
        )
        out["speed"] = speed
        out["r_squared"] = r_squared
        out["speed_rel_error"] = abs(speed - out["c_star"]) / out["c_star"]
    except (NoCrossing, PreconditionError) as e:
        out["speed"] = f"skipped: {e}"
    last = snapshots[-1]
    try:
        front = pdesim.front_position(last, level, sim.field)
        out["front"] = front
        out["behind_front"] = list(
            pdesim.behind_front_state(last, front, sim.width)
        )
    except (NoCrossing, PreconditionError) as e:
        out["behind_front"] = f"skipped: {e}"
    out["margins"] = pdesim.invariant_margins(snapshots, model)
    return out


class Simulate(Node):
    """Runs the reaction-diffusion system from the invasion initial data."""

    subcommand = "simulate"
    description = "Simulates the PDE and measures the spreading speed."

    def _run(self) -> Summary:
        model = self.model
        cfg = sim_config(self.config)
        snapshots = pdesim.run(model, cfg)
        files = write_snapshots(self, snapshots, model.q1)
        summary = front_summary(snapshots, model, self.config)
        summary.update(
            {
                "passed": True,
                "dt": cfg.step_size(model.d),
                "n_snapshots": len(snapshots),
                "files": files,
            }
        )
        return summary


# ---------------------------------------------------------------------------
# figures


@dataclasses.dataclass(frozen=True)
class Figure:
    kind: str
    a: float
    mu: float
    e1: float = 1.0
    d: float = 1.0
    s: float = 0.5

    def model_block(self) -> ModelBlock:
        return ModelBlock(
            kind=self.kind, a=self.a, e1=self.e1, d=self.d, s=self.s, mu=self.mu
        )


FIGURE_MODELS: dict[str, Figure] = {
    "fig1": Figure("holling2", a=1.4, e1=2.0, mu=1.2),
    "fig2": Figure("holling2", a=0.7, e1=1.2, mu=1.4),
    "fig3": Figure("holling2", a=15.0, e1=1.2, mu=0.5),
    "fig4": Figure("lv", a=15.0, mu=0.1),
    "fig5": Figure("lv", a=4.5, mu=0.1),
}
assert tuple(FIGURE_MODELS) == FIGURES


def figure_times(t_end: float, every: float = 20.0) -> tuple[float, ...]:
    n = int(t_end // every)
    return tuple(every * (i + 1) for i in range(n))


def expected_state(model: ModelSpec) -> tuple[float, float]:
    """The state the invasion leaves behind: coexistence, else prey-free."""
    eq = analysis.positive_equilibrium(model)
    return eq if eq is not None else (0.0, model.mu)


class Reproduce(Node):
    """Runs the invasion experiment of one of the reference figures."""

    subcommand = "reproduce"
    description = "Reproduces a reference figure (fig1 ... fig5)."

    @classmethod
    def create_key(cls, config: RunConfig) -> str:
        return f"reproduce_{config.run.figure}"

    def setup(self) -> None:
        figure = FIGURE_MODELS[self.config.run.figure]
        self.config = dataclasses.replace(
            self.config, model=figure.model_block()
        )

    def compare_wave(
        self,
        model: ModelSpec,
        snapshots: Sequence[pdesim.Snapshot],
        speed: float,
    ) -> Summary:
        c = max(speed, analysis.critical_speed(model))
        try:
            extracted = pdesim.extract_profile(snapshots, speed)
            shot = waveode.shoot(model, c)
            return {
                "c": c,
                "distance": waveode.profile_distance(extracted, shot),
            }
        except (
            EscapeError, NotConverged, NoConvergence, PreconditionError
        ) as e:
            self.logger.warning(f"wave comparison skipped: {e}")
            return {"c": c, "skipped": str(e)}

    def _run(self) -> Summary:
        figure = self.config.run.figure
        model = self.model
        cfg = sim_config(self.config, figure_times(self.config.sim.t_end))
        snapshots = pdesim.run(model, cfg)
        files = write_snapshots(self, snapshots, model.q1)
        summary = front_summary(snapshots, model, self.config)

        expected = expected_state(model)
        summary["expected"] = list(expected)
        behind = summary["behind_front"]
        passed = isinstance(behind, list) and all(
            abs(b - e) <= BEHIND_FRONT_TOL for b, e in zip(behind, expected)
        )
        if figure == "fig4":
            fades = isinstance(behind, list) and behind[0] < FADE_TOL
            summary["prey_fades"] = fades
            passed = passed and summary["prey_fades"]
        if isinstance(summary.get("speed"), float):
            summary["wave"] = self.compare_wave(
                model, snapshots, summary["speed"]
            )

        summary.update(
            {
                "figure": figure,
                "passed": passed,
                "dt": cfg.step_size(model.d),
                "n_snapshots": len(snapshots),
                "files": files,
            }
        )
        self.logger.info("reproduced figure", figure=figure, passed=passed)
        return summary


NODES: dict[str, type[Node]] = {
    node.subcommand: node
    for node in (Analyze, Bounds, Wave, Lyapunov, Simulate, Reproduce)
}
