"""
Advection fields b(x, t), their oscillation and midrange, and running suprema.

Spatial sup/inf are taken over grid samples. The preset families are either
band-limited or monotone, so grid extrema converge to the true ones once the
field is resolved (at least 16 cells per length ``2 pi / kappa``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .field import Grid1D, GridFunction

FIELD_KINDS = ("zero", "constant", "cosine", "monotone_tanh", "modulated_cosine")
MIN_SAMPLES_PER_PERIOD = 16
DEFAULT_WINDOW_FRACTION = 0.25


@dataclass(frozen=True)
class FieldSpec:
    """Preset advection field.

    ======================  ===================================
    ``zero``                ``0``
    ``constant``            ``c``
    ``cosine``              ``c + A cos(kappa x)``
    ``monotone_tanh``       ``c + A tanh(kappa x)``
    ``modulated_cosine``    ``c + A sin(omega t) cos(kappa x)``
    ======================  ===================================
    """

    kind: str = "zero"
    amplitude: float = 0.0
    wavenumber: float = 1.0
    offset: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ConfigurationError(f"unknown field kind {self.kind!r}")
        for name in ("amplitude", "wavenumber", "offset", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigurationError(f"field parameter {name} must be finite")
            object.__setattr__(self, name, value)

    def __call__(self, x, t: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        c, a, k = self.offset, self.amplitude, self.wavenumber
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "constant":
            return np.full_like(x, c)
        if self.kind == "cosine":
            return c + a * np.cos(k * x)
        if self.kind == "monotone_tanh":
            return c + a * np.tanh(k * x)
        return c + a * math.sin(self.omega * t) * np.cos(k * x)

    def sup_bound(self, t: float) -> float:
        """Analytic ``sup_x |b(x, t)|``; never below the sampled maximum."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return abs(self.offset)
        if self.kind == "modulated_cosine":
            return abs(self.offset) + abs(self.amplitude * math.sin(self.omega * t))
        return abs(self.offset) + abs(self.amplitude)

    @property
    def is_monotone(self) -> bool:
        """True when ``b_x >= 0`` everywhere."""
        if self.kind in ("zero", "constant"):
            return True
        if self.kind == "monotone_tanh":
            return self.amplitude * self.wavenumber >= 0
        return self.amplitude == 0.0

    @property
    def is_periodic(self) -> bool:
        return self.kind in ("cosine", "modulated_cosine")

    @property
    def time_dependent(self) -> bool:
        return self.kind == "modulated_cosine" and self.omega != 0.0


def check_resolved(spec: FieldSpec, grid: Grid1D) -> None:
    """Reject grids too coarse (or, for periodic fields, too short) for ``spec``."""
    k = abs(spec.wavenumber)
    if spec.kind in ("zero", "constant") or k == 0.0:
        return
    scale = 2.0 * math.pi / k
    if grid.h * MIN_SAMPLES_PER_PERIOD > scale * (1 + 1e-12):
        raise ConfigurationError(
            f"grid spacing {grid.h:.4g} under-resolves the {spec.kind} field "
            f"(need h <= {scale / MIN_SAMPLES_PER_PERIOD:.4g})"
        )
    if spec.is_periodic and grid.length < scale * (1 - 1e-12):
        raise ConfigurationError(
            f"domain of length {grid.length:.4g} is shorter than one field period {scale:.4g}"
        )


def sample_field(spec: FieldSpec, grid: Grid1D, t: float) -> GridFunction:
    return GridFunction(grid, spec(grid.centers, t))


def sample_faces(spec: FieldSpec, grid: Grid1D, t: float) -> np.ndarray:
    """Field values at the right cell faces ``x_{i+1/2}``."""
    return spec(grid.faces, t)


def _extrema(spec: FieldSpec, grid: Grid1D, t: float):
    check_resolved(spec, grid)
    b = spec(grid.centers, t)
    return float(b.max()), float(b.min())


def oscillation(spec: FieldSpec, grid: Grid1D, t: float) -> float:
    """Half-range ``(max b - min b) / 2`` of the sampled field at time ``t``."""
    hi, lo = _extrema(spec, grid, t)
    return 0.5 * (hi - lo)


def midrange(spec: FieldSpec, grid: Grid1D, t: float) -> float:
    """Centre ``(max b + min b) / 2`` of the sampled field at time ``t``."""
    hi, lo = _extrema(spec, grid, t)
    return 0.5 * (hi + lo)


@dataclass(frozen=True, eq=False)
class ScalarSeries:
    """Scalar samples on strictly increasing times."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if times.size and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.times.size


def running_sup(series: ScalarSeries, t0: float, t: float) -> float:
    """Largest sampled value with ``t0 <= time <= t``."""
    if t0 > t:
        raise ValueError(f"t0={t0} exceeds t={t}")
    mask = (series.times >= t0) & (series.times <= t)
    if not mask.any():
        raise ValueError(f"no samples in [{t0}, {t}]")
    return float(series.values[mask].max())


def tail_limsup(series: ScalarSeries, window_fraction: float = DEFAULT_WINDOW_FRACTION) -> float:
    """Max over the final ``window_fraction`` of the time range.

    A finite-horizon stand-in for ``limsup``; it says nothing about convergence.
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    if len(series) == 0:
        raise ValueError("empty series")
    t_first, t_last = series.times[0], series.times[-1]
    span = t_last - t_first
    start = t_last - window_fraction * span - 1e-12 * span
    return float(series.values[series.times >= start].max())
