"""Traveling waves of Leslie-Gower predator-prey systems."""

from lgwave.config import RunConfig, emit_config, parse_config  # noqa
from lgwave.errors import LGWaveError  # noqa
from lgwave.log import logger  # noqa
from lgwave.model import ModelKind, ModelSpec, builtin_model  # noqa
from lgwave.node import Node  # noqa
from lgwave.run_main import reproduce, run_main, run_subcommand  # noqa
