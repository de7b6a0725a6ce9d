"""Experiment harness: configs, presets, runs and the command line."""

from ..fitting import fit_decay
from .config import ExperimentConfig, load_config, parse_config
from .presets import PRESETS, fig1_scenario, get_preset
from .runner import RunOutcome, run, simulate

__all__ = [
    "ExperimentConfig",
    "PRESETS",
    "RunOutcome",
    "fig1_scenario",
    "fit_decay",
    "get_preset",
    "load_config",
    "parse_config",
    "run",
    "simulate",
]
