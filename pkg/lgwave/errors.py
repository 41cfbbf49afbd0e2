"""Exceptions raised by lgwave.

Every error carries the exit code the command line reports for it.
"""

from __future__ import annotations

from typing import ClassVar, Optional, Sequence


class LGWaveError(Exception):
    exit_code: ClassVar[int] = 1


class DomainError(LGWaveError, ValueError):
    """A parameter or input lies outside the admissible domain."""


class ComplexEigenvalues(DomainError):
    def __init__(self, c: float, c_star: float):
        super().__init__(
            f"c below critical speed: c={c:.17g} < c*={c_star:.17g}"
        )
        self.c = c
        self.c_star = c_star


class PreconditionError(DomainError):
    pass


class OrderingError(PreconditionError):
    """Upper and lower solutions are not ordered."""


class EmptyInterval(DomainError):
    def __init__(self, name: str, lower: float, upper: float):
        super().__init__(
            f"empty interval for {name}: ({lower:.17g}, {upper:.17g})"
        )
        self.lower = lower
        self.upper = upper


class WindowError(DomainError):
    pass


class EscapeError(LGWaveError):
    """The wave orbit left the admissible box."""

    def __init__(
        self,
        message: str,
        z: Optional[float] = None,
        state: Optional[Sequence[float]] = None,
    ):
        if z is not None:
            message = f"{message} (z={z:.6g}, state={list(state or [])})"
        super().__init__(message)
        self.z = z
        self.state = state


class NoConvergence(LGWaveError):
    def __init__(self, message: str, gap: float):
        super().__init__(f"{message} (last gap {gap:.3e})")
        self.gap = gap


class NoCrossing(LGWaveError):
    pass


class NotConverged(LGWaveError):
    pass


class StabilityError(LGWaveError):
    pass


class ConfigError(LGWaveError):
    pass


class ParseError(ConfigError):
    def __init__(self, message: str, lineno: Optional[int] = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ValidationError(ConfigError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key} {message}")
        self.key = key


class VerificationError(LGWaveError):
    exit_code: ClassVar[int] = 2


class BoundsFail(VerificationError):
    pass


class TruncationWarning(UserWarning):
    pass


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, LGWaveError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 3
    return 1
