"""Command-line flags of the subcommands, parsed by typed-argument-parser."""
from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Optional, Sequence, Tuple, TypeVar

import tap

from lgwave.config import RunConfig, parse_config

ARGS = TypeVar("ARGS", bound="Args")

# tap methods that must win over those a frozen dataclass generates
_TAP_METHODS = ("__init__", "__setattr__", "parse_args", "process_args")


def _tap_parser(cls: type) -> tap.Tap:
    """A tap parser with the fields of the dataclass ``cls`` as arguments.

    The parser class reuses the dataclass' ``__dict__``, so tap finds the
    field comments in the source and shows them as help.
    """
    dct = dict(cls.__dict__)
    for name in _TAP_METHODS:
        dct[name] = getattr(tap.Tap, name)
    parser_cls = type(cls.__name__ + "Parser", cls.__bases__ + (tap.Tap,), dct)
    return parser_cls()


@dataclasses.dataclass(frozen=True)
class Args:
    """Frozen dataclass whose fields double as command-line flags."""

    @classmethod
    def parse_args(
        cls: type[ARGS], args: Optional[Sequence[str]] = None
    ) -> ARGS:
        parser = _tap_parser(cls)
        parsed = parser.parse_args(args)
        kwargs = {
            name: getattr(parsed, name) for name in parser._get_annotations()
        }
        try:
            return cls(**kwargs)
        except TypeError as e:
            e.args = e.args + (
                "Maybe you forgot to add @dataclasses.dataclass"
                " to your Args class?",
            )
            raise


@dataclasses.dataclass(frozen=True)
class RunArgs(Args):
    """Flags shared by every subcommand."""

    config: Optional[str] = None  # path to a config file
    override: Tuple[str, ...] = ()  # section.key=value, wins over the file
    output_dir: Optional[str] = None
    figure: Optional[str] = None  # reproduce only
    pdb: bool = False

    def config_text(self) -> str:
        if self.config is None:
            return ""
        return Path(self.config).read_text(encoding="utf-8")

    def to_config(self, subcommand: str) -> RunConfig:
        """Reads ``--config``, applies ``--override`` and validates the result.

        Raises ``OSError`` when the config file cannot be read.
        """
        figure = self.figure
        if subcommand == "reproduce" and figure is None:
            figure = ""
        return parse_config(
            self.config_text(),
            self.override,
            subcommand=subcommand,
            figure=figure,
        )
