from __future__ import annotations

import argparse
import sys
from typing import Optional

from lgwave import env, io, log, utils
from lgwave.args import RunArgs
from lgwave.commands import NODES
from lgwave.config import RunConfig, parse_config
from lgwave.errors import LGWaveError, exit_code_for
from lgwave.log import logger


def _diagnostic(exc: BaseException) -> str:
    text = " ".join(str(exc).split()) or type(exc).__name__
    return f"error: {type(exc).__name__}: {text}"


def run_subcommand(
    config: RunConfig,
    output_dir: Optional[io.PATH_LIKE] = None,
    stderr_level: Optional[str] = None,
) -> int:
    """Runs the node of ``config.subcommand`` and returns the exit code.

    The summary table goes to stdout; errors become a single line on stderr.
    """
    try:
        if config.subcommand not in NODES:
            raise LGWaveError(f"unknown subcommand {config.subcommand!r}")
        storage = io.LocalStorage(
            env.output_root(output_dir or config.output.directory)
        )
        node = NODES[config.subcommand](
            config, storage, stderr_level=stderr_level
        )
        summary = node.run()
    except (LGWaveError, OSError) as e:
        logger.opt(exception=e).debug("run failed")
        print(_diagnostic(e), file=sys.stderr)
        return exit_code_for(e)
    print(io.format_table(summary, title=node.key))
    logger.info(
        "Finished running Node",
        key=node.key,
        output_dir=str(node.output_dir),
    )
    return 0


def reproduce(
    figure_id: str,
    output_dir: Optional[io.PATH_LIKE] = None,
    overrides: tuple[str, ...] = (),
) -> int:
    try:
        config = parse_config(
            "", overrides, subcommand="reproduce", figure=figure_id
        )
    except LGWaveError as e:
        print(_diagnostic(e), file=sys.stderr)
        return exit_code_for(e)
    return run_subcommand(config, output_dir)


class MainRunner:
    def __init__(self, argv: Optional[list[str]] = None):
        self.all_argv = sys.argv[1:] if argv is None else list(argv)

        self.setup_parser = argparse.ArgumentParser(add_help=False)
        self.setup_parser.add_argument(
            "--debug",
            action="store_true",
            help="Print debug information.",
        )
        first_no_dash = min(
            (i for i, a in enumerate(self.all_argv) if not a.startswith("--")),
            default=len(self.all_argv),
        )
        self.setup_args, _ = self.setup_parser.parse_known_args(
            self.all_argv[:first_no_dash]
        )
        self.argv = self.all_argv[first_no_dash:]

        self.stderr_level = "DEBUG" if self.setup_args.debug else None
        log.setup_logger(stderr_level=self.stderr_level or "INFO")
        self.create_parser()

    def create_parser(self) -> None:
        # we need to use argparse as tap cannot handle subparsers properly.
        self.parser = argparse.ArgumentParser(prog="lgwave")
        self.parser.set_defaults(func=self.help)
        self.subparsers = self.parser.add_subparsers()

        for name, node_cls in NODES.items():
            sub = self.subparsers.add_parser(
                name, description=node_cls.description, add_help=False
            )
            sub.add_argument(
                "-h", "--help", action="store_true", help="Print help message."
            )
            sub.set_defaults(func=self.run, subcommand=name)

    def help(self) -> int:
        print("Here is a list with all available actions:", file=sys.stderr)
        for name, choice in self.subparsers.choices.items():
            print(f"    {name:<10} {choice.description}", file=sys.stderr)
        return 0

    def run(self) -> int:
        if self.args.help:
            # the subcommand's flags are those of RunArgs
            self.unknown_args.append("--help")
        args = RunArgs.parse_args(self.unknown_args)
        try:
            config = args.to_config(self.args.subcommand)
        except (LGWaveError, OSError) as e:
            print(_diagnostic(e), file=sys.stderr)
            return exit_code_for(e)

        with utils.pdb_post_mortem(args.pdb):
            return run_subcommand(config, args.output_dir, self.stderr_level)

    def __call__(self) -> int:
        if not self.argv or self.argv[0] in ["-h", "help", "--help"]:
            return self.help()
        self.args, self.unknown_args = self.parser.parse_known_args(self.argv)
        return self.args.func()


def run_main(argv: Optional[list[str]] = None) -> int:
    runner = MainRunner(argv)
    return runner()


def main() -> None:
    sys.exit(run_main())
