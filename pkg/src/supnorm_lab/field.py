"""
Spatial discretization on a uniform periodic mesh.

The whole line is replaced by a periodic interval ``[x_min, x_max)`` split
into ``n_cells`` equal cells; functions are sampled at cell centres.
Norms use the midpoint rule, derivatives a periodic central difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError

MIN_CELLS = 8
# Width of the edge strip, as a fraction of the domain, split between both ends.
EDGE_FRACTION = 0.05
# Largest admissible share of |u| mass inside the edge strip.
CONTAMINATION_LIMIT = 1e-8
# Relative amplitude below which a profile counts as outside its support.
SUPPORT_THRESHOLD = 1e-14

PROFILE_KINDS = ("gaussian", "box", "bimodal_signed", "trig_poly")
NORMALIZATIONS = ("none", "unit_l1", "unit_sup")


def parse_exponent(p) -> float:
    """Return ``p`` as a float, accepting ``"inf"``/``"infinity"`` for the sup norm."""
    if isinstance(p, str):
        key = p.strip().lower()
        if key in ("inf", "infinity", "linf"):
            return math.inf
        try:
            p = float(key)
        except ValueError:
            raise ConfigurationError(f"cannot interpret norm exponent {p!r}") from None
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ConfigurationError(f"norm exponent must be >= 1 or infinity, got {p}")
    return p


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic mesh with cell centres ``x_min + (i + 1/2) h``."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"grid extent must be positive (x_min={self.x_min}, x_max={self.x_max})"
            )
        if int(self.n_cells) != self.n_cells or self.n_cells < MIN_CELLS:
            raise ConfigurationError(
                f"n_cells must be an integer >= {MIN_CELLS}, got {self.n_cells}"
            )
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        """Right faces ``x_{i+1/2}``, one per cell (the last one is ``x_max``)."""
        return self.x_min + (np.arange(self.n_cells) + 1.0) * self.h

    def edge_mask(self, fraction: float = EDGE_FRACTION) -> np.ndarray:
        """Cells lying in the outer ``fraction`` of the domain (half on each side)."""
        x = self.centers
        strip = 0.5 * fraction * self.length
        return (x < self.x_min + strip) | (x > self.x_max - strip)


def make_grid(x_min: float, x_max: float, n_cells: int) -> Grid1D:
    return Grid1D(float(x_min), float(x_max), n_cells)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real function at the cell centres of ``grid``.

    The value array is copied and frozen on construction.
    """

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n_cells,):
            raise ValueError(
                f"expected {self.grid.n_cells} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, grid: Grid1D, func) -> "GridFunction":
        return cls(grid, func(grid.centers))

    def _check(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise ValueError("grid functions live on different grids")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - other)

    def __mul__(self, scalar: float):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)


def lp_norm(f: GridFunction, p) -> float:
    """Midpoint-rule ``L^p`` norm; ``p = inf`` gives the largest sample magnitude.

    Parameters
    ----------
    f : GridFunction
    p : float or str
        Exponent ``>= 1``, or ``float('inf')`` / ``"inf"``.
    """
    p = parse_exponent(p)
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    if p == 1.0:
        return float(f.grid.h * a.sum())
    # scale by the peak so high powers neither overflow nor underflow
    peak = a.max()
    if peak == 0.0:
        return 0.0
    return float(peak * (f.grid.h * np.sum((a / peak) ** p)) ** (1.0 / p))


def mass(f: GridFunction) -> float:
    """Signed integral ``h * sum(f_i)``."""
    return float(f.grid.h * f.values.sum())


def derivative(f: GridFunction) -> GridFunction:
    """Periodic central difference ``(f_{i+1} - f_{i-1}) / 2h``."""
    v = f.values
    return GridFunction(f.grid, (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * f.grid.h))


def boundary_fraction(values: np.ndarray, grid: Grid1D) -> float:
    """Share of ``sum |u|`` that sits in the edge strip of the domain."""
    a = np.abs(np.asarray(values))
    total = a.sum()
    if total == 0.0:
        return 0.0
    return float(a[grid.edge_mask()].sum() / total)


@dataclass(frozen=True)
class ProfileSpec:
    """Declarative initial datum.

    ``gaussian``
        ``sum_k a_k exp(-((x - c_k) / w_k)^2)``.
    ``box``
        ``a_k`` on ``|x - c_k| <= w_k / 2``.
    ``bimodal_signed``
        Two gaussian bumps, the second one negated.
    ``trig_poly``
        ``sum_k a_k cos(k x) + b_k sin(k x)`` with ``coefficients = [(a_0, b_0), ...]``.
        Periodic by construction, so it is exempt from the support check.
    """

    kind: str = "gaussian"
    centers: tuple = (0.0,)
    widths: tuple = (1.0,)
    amplitudes: tuple = (1.0,)
    coefficients: tuple = ()
    normalization: str = "none"

    def __post_init__(self):
        for name in ("centers", "widths", "amplitudes"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(
            self, "coefficients", tuple(tuple(float(c) for c in pair) for pair in self.coefficients)
        )
        if self.kind not in PROFILE_KINDS:
            raise ConfigurationError(f"unknown profile kind {self.kind!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(f"unknown normalization {self.normalization!r}")
        if self.kind == "trig_poly":
            if not self.coefficients:
                raise ConfigurationError("trig_poly needs a non-empty coefficient list")
            if any(len(pair) != 2 for pair in self.coefficients):
                raise ConfigurationError("trig_poly coefficients are (cos, sin) pairs")
            return
        n_bumps = 2 if self.kind == "bimodal_signed" else len(self.centers)
        if n_bumps == 0:
            raise ConfigurationError(f"{self.kind} profile needs at least one center")
        for name in ("centers", "widths", "amplitudes"):
            seq = getattr(self, name)
            if len(seq) not in (1, n_bumps):
                raise ConfigurationError(
                    f"{self.kind}: {name} must have 1 or {n_bumps} entries, got {len(seq)}"
                )
        if self.kind == "bimodal_signed" and len(self.centers) != 2:
            raise ConfigurationError("bimodal_signed needs exactly two centers")
        if any(not (w > 0 and math.isfinite(w)) for w in self.widths):
            raise ConfigurationError("profile widths must be strictly positive")

    def _bumps(self):
        n = len(self.centers)
        widths = self.widths * n if len(self.widths) == 1 else self.widths
        amps = self.amplitudes * n if len(self.amplitudes) == 1 else self.amplitudes
        return zip(self.centers, widths, amps)


def _sample_profile(spec: ProfileSpec, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    if spec.kind == "trig_poly":
        for k, (a, b) in enumerate(spec.coefficients):
            out += a * np.cos(k * x) + b * np.sin(k * x)
        return out
    for k, (c, w, a) in enumerate(spec._bumps()):
        if spec.kind == "box":
            out += np.where(np.abs(x - c) <= 0.5 * w, a, 0.0)
        else:
            sign = -1.0 if (spec.kind == "bimodal_signed" and k == 1) else 1.0
            out += sign * a * np.exp(-(((x - c) / w) ** 2))
    return out


def touches_boundary(values: np.ndarray, threshold: float = SUPPORT_THRESHOLD) -> bool:
    """True when the end cells carry more than ``threshold`` times the peak amplitude."""
    a = np.abs(values)
    peak = a.max()
    if peak == 0.0:
        return False
    return bool(max(a[0], a[-1]) > threshold * peak)


def initial_profile(spec: ProfileSpec, grid: Grid1D) -> GridFunction:
    """Sample ``spec`` on ``grid`` and apply its normalization.

    Raises
    ------
    ConfigurationError
        If a localized profile is still above the support threshold at the
        domain ends, i.e. the truncated domain is too small for it.
    """
    values = _sample_profile(spec, grid.centers)
    if spec.kind != "trig_poly" and touches_boundary(values):
        raise ConfigurationError(
            f"{spec.kind} profile reaches the domain boundary "
            f"[{grid.x_min}, {grid.x_max}]; enlarge the domain"
        )
    if not np.any(values):
        raise ConfigurationError("profile vanishes identically on this grid")
    if spec.normalization == "unit_l1":
        values = values / (grid.h * np.abs(values).sum())
    elif spec.normalization == "unit_sup":
        values = values / np.abs(values).max()
    return GridFunction(grid, values)
