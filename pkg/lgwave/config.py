"""The run configuration: ``[section]`` headers with ``key = value`` lines.

Sections are ``run``, ``model``, ``wave``, ``sim`` and ``output``; every
key maps onto a field of the frozen blocks below. Command-line overrides
``section.key=value`` are applied on top of the text before conversion.
"""

from __future__ import annotations

import configparser
import dataclasses
import typing
from typing import Any, Mapping, Optional, Sequence

import anyconfig

from lgwave.errors import ParseError, ValidationError
from lgwave.log import LEVELS
from lgwave.model import ModelKind, ModelSpec, builtin_model

SUBCOMMANDS = ("analyze", "bounds", "wave", "lyapunov", "simulate", "reproduce")
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")
FORMATS = ("csv", "svg")
WAVE_METHODS = ("shoot", "monotone", "both")
LYAPUNOV_KINDS = ("auto", "coexistence", "preyfree", "novel")


@dataclasses.dataclass(frozen=True)
class RunBlock:
    subcommand: Optional[str] = None
    figure: Optional[str] = None


@dataclasses.dataclass(frozen=True)
class ModelBlock:
    kind: Optional[str] = None
    a: float = 1.0
    e1: float = 1.0
    m: float = 1.0
    d: float = 1.0
    s: float = 0.5
    mu: float = 0.1

    def build(self) -> ModelSpec:
        if self.kind is None:
            raise ValidationError("model.kind", "required")
        return builtin_model(
            self.kind,
            a=self.a,
            e1=self.e1,
            m=self.m,
            d=self.d,
            s=self.s,
            mu=self.mu,
        )


@dataclasses.dataclass(frozen=True)
class WaveBlock:
    c: Optional[float] = None
    method: str = "shoot"
    delta: float = 1e-6
    z_span: float = 400.0
    step_tol: float = 1e-10
    spacing: float = 0.01
    gamma: Optional[float] = None
    n_max: int = 50_000
    conv_tol: float = 1e-9
    sigma: Optional[float] = None
    r: Optional[float] = None
    z_min: float = -80.0
    z_max: float = 40.0
    n_grid: int = 100_000
    tol: float = 1e-10
    lyapunov: str = "auto"


@dataclasses.dataclass(frozen=True)
class SimBlock:
    x_min: float = -200.0
    x_max: float = 200.0
    dx: float = 0.2
    dt: Optional[float] = None
    t_end: float = 200.0
    snapshot_times: tuple[float, ...] = ()
    t_burn: float = 60.0
    level: Optional[float] = None
    field: str = "v"
    width: float = 50.0


@dataclasses.dataclass(frozen=True)
class OutputBlock:
    directory: Optional[str] = None
    formats: tuple[str, ...] = FORMATS
    verbosity: str = "INFO"
    reproducible: bool = False


@dataclasses.dataclass(frozen=True)
class RunConfig:
    run: RunBlock = RunBlock()
    model: ModelBlock = ModelBlock()
    wave: WaveBlock = WaveBlock()
    sim: SimBlock = SimBlock()
    output: OutputBlock = OutputBlock()

    @property
    def subcommand(self) -> Optional[str]:
        return self.run.subcommand


SECTIONS: dict[str, type] = {
    "run": RunBlock,
    "model": ModelBlock,
    "wave": WaveBlock,
    "sim": SimBlock,
    "output": OutputBlock,
}


# ---------------------------------------------------------------------------
# value conversion


def _to_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValidationError(key, f"must be a boolean, got {value!r}")


def _to_number(key: str, value: Any, kind: type) -> Any:
    if isinstance(value, bool):
        raise ValidationError(key, f"must be a number, got {value!r}")
    try:
        if kind is int:
            return int(str(value).replace("_", ""))
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(key, f"must be a number, got {value!r}")


def _split(value: Any) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _convert(key: str, value: Any, hint: Any) -> Any:
    origin = typing.get_origin(hint)
    type_args = typing.get_args(hint)
    if origin is typing.Union and type(None) in type_args:
        if value is None or str(value).strip().lower() in ("", "none"):
            return None
        inner = next(a for a in type_args if a is not type(None))
        return _convert(key, value, inner)
    if origin is tuple:
        return tuple(
            _convert(key, part, type_args[0]) for part in _split(value)
        )
    if hint is bool:
        return _to_bool(key, value)
    if hint in (int, float):
        return _to_number(key, value, hint)
    return str(value).strip()


def _build_block(section: str, values: Mapping[str, Any]) -> Any:
    cls = SECTIONS[section]
    hints = typing.get_type_hints(cls)
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in values.items():
        if key not in known:
            raise ValidationError(f"{section}.{key}", "is not a known key")
        kwargs[key] = _convert(f"{section}.{key}", value, hints[key])
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# parsing


def _load_text(text: str) -> dict[str, dict[str, Any]]:
    if not text.strip():
        return {}
    try:
        loaded = anyconfig.loads(text, ac_parser="ini")
    except configparser.Error as e:
        lineno = getattr(e, "lineno", None)
        if lineno is None and getattr(e, "errors", None):
            lineno = e.errors[0][0]  # type: ignore[attr-defined]
        raise ParseError(e.message.splitlines()[0], lineno)
    sections = {}
    for name, values in dict(loaded or {}).items():
        if name == "DEFAULT" and not values:
            continue
        if name not in SECTIONS:
            raise ValidationError(name, "is not a known section")
        sections[name] = dict(values)
    return sections


def apply_overrides(
    sections: dict[str, dict[str, Any]], overrides: Sequence[str]
) -> dict[str, dict[str, Any]]:
    for override in overrides:
        key, sep, value = override.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ValidationError(
                override, "is not of the form section.key=value"
            )
        if section not in SECTIONS:
            raise ValidationError(section, "is not a known section")
        sections.setdefault(section, {})[name] = value.strip()
    return sections


def _validate(config: RunConfig) -> None:
    subcommand = config.run.subcommand
    if subcommand is not None and subcommand not in SUBCOMMANDS:
        raise ValidationError(
            "run.subcommand", f"must be one of {', '.join(SUBCOMMANDS)}"
        )
    if subcommand == "reproduce":
        if config.run.figure not in FIGURES:
            raise ValidationError(
                "run.figure",
                f"unknown figure {config.run.figure!r} "
                f"({', '.join(FIGURES)})",
            )
    else:
        if config.model.kind is None:
            raise ValidationError("model.kind", "required")
        ModelKind.parse(config.model.kind)
        for name in ("a", "e1", "m", "d", "s", "mu"):
            if not getattr(config.model, name) > 0:
                raise ValidationError(f"model.{name}", "must be positive")
    if subcommand in ("bounds", "wave", "lyapunov") and config.wave.c is None:
        raise ValidationError("wave.c", "required")
    if config.wave.method not in WAVE_METHODS:
        raise ValidationError(
            "wave.method", f"must be one of {', '.join(WAVE_METHODS)}"
        )
    if config.wave.lyapunov not in LYAPUNOV_KINDS:
        raise ValidationError(
            "wave.lyapunov", f"must be one of {', '.join(LYAPUNOV_KINDS)}"
        )
    if config.output.verbosity not in LEVELS:
        raise ValidationError(
            "output.verbosity", f"must be one of {', '.join(LEVELS)}"
        )
    for fmt in config.output.formats:
        if fmt not in FORMATS:
            raise ValidationError("output.formats", f"unknown format {fmt!r}")
    if config.sim.field not in ("u", "v"):
        raise ValidationError("sim.field", "must be u or v")


def parse_config(
    text: str,
    overrides: Sequence[str] = (),
    subcommand: Optional[str] = None,
    figure: Optional[str] = None,
) -> RunConfig:
    """Parses and validates a config text.

    ``subcommand`` and ``figure`` take the place of the ``[run]`` keys.
    """
    sections = apply_overrides(_load_text(text), overrides)
    if subcommand is not None:
        sections.setdefault("run", {})["subcommand"] = subcommand
    if figure is not None:
        sections.setdefault("run", {})["figure"] = figure
    blocks = {
        name: _build_block(name, values) for name, values in sections.items()
    }
    config = RunConfig(**blocks)
    _validate(config)
    return config


def _emit_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_emit_value(v) for v in value)
    return str(value)


def emit_config(config: RunConfig) -> str:
    """Writes every key with defaults filled; ``None`` entries are left out."""
    lines = []
    for section in SECTIONS:
        block = getattr(config, section)
        lines.append(f"[{section}]")
        for f in dataclasses.fields(block):
            value = getattr(block, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_emit_value(value)}")
        lines.append("")
    return "\n".join(lines)
