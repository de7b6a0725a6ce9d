"""Ready-made experiments, each runnable with ``supnorm-lab preset <name>``."""

from __future__ import annotations

import math

from ..advect import FieldSpec
from ..field import Grid1D, ProfileSpec
from ..solver import SchemeConfig
from .config import ExperimentConfig, RunBlock

UNIT_GAUSSIAN = ProfileSpec("gaussian", (0.0,), (1.0,), (1.0,), normalization="unit_l1")
# Backward Euler keeps every stage monotone, so the structural checks are exact.
MONOTONE_SCHEME = SchemeConfig(cfl_safety=0.5, max_dt=0.01, diffusion_scheme="backward_euler")
P_LIST = (1.0, 2.0, 4.0, math.inf)


def heat() -> ExperimentConfig:
    return ExperimentConfig(
        name="heat",
        grid=Grid1D(-60.0, 60.0, 4096),
        field=FieldSpec("zero"),
        initial=UNIT_GAUSSIAN,
        scheme=MONOTONE_SCHEME,
        run=RunBlock(t_end=20.0, sample_dt=0.1, p_list=P_LIST),
    )


def constant_b() -> ExperimentConfig:
    return ExperimentConfig(
        name="constant_b",
        grid=Grid1D(-120.0, 120.0, 4096),
        field=FieldSpec("constant", offset=2.0),
        initial=UNIT_GAUSSIAN,
        scheme=MONOTONE_SCHEME,
        run=RunBlock(t_end=20.0, sample_dt=0.1, p_list=P_LIST),
    )


def fig1_scenario() -> ExperimentConfig:
    """``b = 5 cos x`` acting on a unit-mass gaussian: growth, a peak, then slow decay."""
    return ExperimentConfig(
        name="fig1",
        grid=Grid1D(-40.0 * math.pi, 40.0 * math.pi, 16384),
        field=FieldSpec("cosine", amplitude=5.0, wavenumber=1.0),
        initial=UNIT_GAUSSIAN,
        scheme=MONOTONE_SCHEME,
        # samples every 0.05 keep the energy-identity quadrature error below the solver error
        run=RunBlock(t_end=50.0, sample_dt=0.05, p_list=P_LIST),
    )


def monotone() -> ExperimentConfig:
    """Diverging field ``b = tanh x`` (``b_x >= 0``); the datum splits and decays like ``t^-1/2``."""
    return ExperimentConfig(
        name="monotone",
        grid=Grid1D(-250.0, 250.0, 4096),
        field=FieldSpec("monotone_tanh", amplitude=1.0, wavenumber=1.0),
        initial=UNIT_GAUSSIAN,
        scheme=MONOTONE_SCHEME,
        run=RunBlock(t_end=100.0, sample_dt=0.5, p_list=P_LIST),
    )


def modulated() -> ExperimentConfig:
    return ExperimentConfig(
        name="modulated",
        grid=Grid1D(-40.0 * math.pi, 40.0 * math.pi, 8192),
        field=FieldSpec("modulated_cosine", amplitude=3.0, wavenumber=1.0, omega=1.0),
        initial=UNIT_GAUSSIAN,
        scheme=MONOTONE_SCHEME,
        run=RunBlock(t_end=30.0, sample_dt=0.1, p_list=P_LIST),
    )


PRESETS = {
    "heat": heat,
    "constant_b": constant_b,
    "fig1": fig1_scenario,
    "monotone": monotone,
    "modulated": modulated,
}


def get_preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
