from __future__ import annotations

import abc
import copy
import dataclasses
import random
from pathlib import Path
from typing import Any, Callable, ClassVar, Optional

import reproducible as reproducible_mod

from lgwave import env as env_mod
from lgwave import io, log, utils
from lgwave.config import RunConfig, emit_config
from lgwave.errors import VerificationError
from lgwave.log import logger
from lgwave.model import ModelSpec

Summary = dict[str, Any]


@dataclasses.dataclass
class HookHandle:
    hooks: dict
    idx: int

    def remove(self) -> None:
        del self.hooks[self.idx]


_reproducible: Optional[reproducible_mod.Context] = None


def get_reproducible(
    project_dir: Optional[Path], reload: bool = False
) -> reproducible_mod.Context:
    global _reproducible
    if _reproducible is not None and not reload:
        return copy.deepcopy(_reproducible)

    reproducible = reproducible_mod.Context()
    if project_dir is not None:
        reproducible.add_repo(
            path=str(project_dir), allow_dirty=True, diff=True
        )
    reproducible.add_pip_packages()
    reproducible.add_cpu_info()
    _reproducible = reproducible
    return copy.deepcopy(reproducible)


def model_key(config: RunConfig) -> str:
    model = config.model.build()
    parts = [model.kind.value]
    parts += [
        f"{name}{utils.short_number(value)}"
        for name, value in model.key_params().items()
    ]
    return "_".join(parts)


class Node(metaclass=abc.ABCMeta):
    """One subcommand run: a config, a key and an output directory.

    Attributes:
        key: names the run's directory inside the storage.
        storage: where the run directory is created.
        config: the validated run configuration.
    """

    subcommand: ClassVar[str]
    description: ClassVar[str] = ""

    def __init__(
        self,
        config: RunConfig,
        storage: io.LocalStorage,
        key: Optional[str] = None,
        stderr_level: Optional[str] = None,
    ):
        self.config = config
        self.storage = storage
        self.key: str = key if key is not None else self.create_key(config)
        self.stderr_level = stderr_level or config.output.verbosity
        self.logger = logger.bind(key=self.key)
        self._hooks_pre_run: dict[int, Callable[[Node], None]] = {}
        self._hooks_run: dict[int, Callable[[Node, Summary], None]] = {}

        self.register_pre_run_hook(self.setup_logger)
        self.setup()

    def setup_logger(self, _: Node) -> None:
        log.setup_logger(
            self.output_dir,
            bind={"key": self.key},
            stderr_level=self.stderr_level,
        )
        self.logger = logger.bind(key=self.key)

    def setup(self) -> None:
        pass

    @property
    def model(self) -> ModelSpec:
        return self.config.model.build()

    def register_pre_run_hook(self, hook: Callable[[Node], None]) -> HookHandle:
        """Registers a hook which is executed before the node is run."""
        idx = random.randint(0, 2**64)
        self._hooks_pre_run[idx] = hook
        return HookHandle(self._hooks_pre_run, idx)

    def register_run_hook(
        self, hook: Callable[[Node, Summary], None]
    ) -> HookHandle:
        """Registers a hook which is executed after the node is run."""
        idx = random.randint(0, 2**64)
        self._hooks_run[idx] = hook
        return HookHandle(self._hooks_run, idx)

    @classmethod
    def create_key(cls, config: RunConfig) -> str:
        """Subcommand, model kind and the key parameters."""
        return f"{cls.subcommand}_{model_key(config)}"

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def wants(self, fmt: str) -> bool:
        return fmt in self.config.output.formats

    def export_reproducible(self) -> None:
        try:
            context = get_reproducible(env_mod.infer_project_dir())
            context.add_data("node.subcommand", self.subcommand)
            context.export_json(self.path("reproducible.json"))
        except Exception as e:
            self.logger.warning(f"Could not record the environment: {e}")

    def run(self) -> Summary:
        """Executes the node and writes ``summary.toml``.

        An existing run directory with the same key is overwritten, so the
        outputs of two identical runs are identical.

        Raises:
            VerificationError: when the summary reports ``passed = false``.
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for pre_hook in list(self._hooks_pre_run.values()):
            pre_hook(self)
        self.logger.info(
            "Run Node",
            node=self.name,
            key=self.key,
            output_dir=str(self.output_dir),
        )
        config_file = self.path("config.ini")
        with self.storage.open(Path(self.key) / "config.ini", "w") as f:
            f.write(emit_config(self.config))
        self.logger.info(f"Saving config to: {config_file}")

        if self.config.output.reproducible:
            self.export_reproducible()

        summary = self._run()

        summary_file = io.write_summary(self.path("summary.toml"), summary)
        self.logger.info(f"Saving summary to: {summary_file}")
        for hook in list(self._hooks_run.values()):
            hook(self, summary)

        if not summary.get("passed", True):
            raise VerificationError(
                f"{self.subcommand} verification failed "
                f"(see {summary_file})"
            )
        return summary

    @abc.abstractmethod
    def _run(self) -> Summary:
        """Subclasses compute here and return the flat summary."""

    @property
    def output_dir(self) -> Path:
        """The output directory of the node (storage / key)."""
        return self.storage / self.key

    @property
    def name(self) -> str:
        return type(self).__qualname__
