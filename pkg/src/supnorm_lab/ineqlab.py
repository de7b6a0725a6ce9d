"""
Empirical checks of the 1-D Nash and sup-interpolation inequalities on a
seeded corpus of smooth, effectively compactly supported functions.

Derivatives come from the same central difference the solver diagnostics
use, so the ratios measure exactly what the trajectory checks rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .bounds import C2, C_INF
from .exceptions import ConfigurationError
from .field import Grid1D, GridFunction, derivative, lp_norm, make_grid, touches_boundary

FAMILIES = ("gaussian", "smoothed_box", "trig_packet", "random_bump_sum")
TOL_INEQ = 5e-3

DEFAULT_RANGES = {
    "center": (-5.0, 5.0),
    "width": (0.5, 3.0),
    "amplitude": (0.2, 5.0),
    "box_width": (0.5, 6.0),
    "edge_width": (0.1, 1.0),
    "packet_wavenumber": (0.5, 3.0),
    "n_bumps": (2, 5),
}


@dataclass(frozen=True)
class CorpusSpec:
    """Seeded description of a test-function corpus.

    Families are assigned round-robin; all continuous parameters are drawn
    uniformly from ``ranges`` (missing keys fall back to ``DEFAULT_RANGES``).
    """

    seed: int = 0
    count: int = 200
    families: tuple = FAMILIES
    ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(self.families))
        if self.count < 1:
            raise ConfigurationError(f"corpus count must be >= 1, got {self.count}")
        if not self.families:
            raise ConfigurationError("corpus needs at least one family")
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ConfigurationError(f"unknown families {sorted(unknown)}")
        bad = set(self.ranges) - set(DEFAULT_RANGES)
        if bad:
            raise ConfigurationError(f"unknown parameter ranges {sorted(bad)}")

    def range(self, key: str):
        return self.ranges.get(key, DEFAULT_RANGES[key])


def default_grid(n_cells: int = 4096) -> Grid1D:
    return make_grid(-40.0, 40.0, n_cells)


def _draw(rng, spec: CorpusSpec, key: str) -> float:
    lo, hi = spec.range(key)
    return float(rng.uniform(lo, hi))


def _member(family: str, rng, spec: CorpusSpec, x: np.ndarray):
    c = _draw(rng, spec, "center")
    a = _draw(rng, spec, "amplitude")
    if family == "gaussian":
        w = _draw(rng, spec, "width")
        return a * np.exp(-(((x - c) / w) ** 2)), dict(center=c, width=w, amplitude=a)
    if family == "smoothed_box":
        bw = _draw(rng, spec, "box_width")
        s = _draw(rng, spec, "edge_width")
        lo, hi = c - 0.5 * bw, c + 0.5 * bw
        r2 = math.sqrt(2.0) * s
        vals = 0.5 * a * (erf((x - lo) / r2) - erf((x - hi) / r2))
        return vals, dict(center=c, box_width=bw, edge_width=s, amplitude=a)
    if family == "trig_packet":
        w = _draw(rng, spec, "width")
        k = _draw(rng, spec, "packet_wavenumber")
        phase = float(rng.uniform(0.0, 2.0 * math.pi))
        vals = a * np.cos(k * (x - c) + phase) * np.exp(-(((x - c) / w) ** 2))
        return vals, dict(center=c, width=w, wavenumber=k, phase=phase, amplitude=a)
    lo, hi = spec.range("n_bumps")
    n = int(rng.integers(lo, hi + 1))
    vals = np.zeros_like(x)
    bumps = []
    for _ in range(n):
        cj = _draw(rng, spec, "center")
        wj = _draw(rng, spec, "width")
        aj = _draw(rng, spec, "amplitude") * float(rng.choice([-1.0, 1.0]))
        vals += aj * np.exp(-(((x - cj) / wj) ** 2))
        bumps.append((cj, wj, aj))
    return vals, dict(bumps=bumps)


def generate_corpus(spec: CorpusSpec, grid: Grid1D, with_params: bool = False) -> list:
    """Deterministic list of nonzero grid functions (optionally with their parameters).

    Raises
    ------
    ConfigurationError
        If a member still has non-negligible amplitude at the domain ends.
    """
    rng = np.random.default_rng(spec.seed)
    x = grid.centers
    out = []
    for i in range(spec.count):
        family = spec.families[i % len(spec.families)]
        vals, params = _member(family, rng, spec, x)
        if not np.any(vals):
            raise ConfigurationError(f"corpus member {i} ({family}) vanishes on the grid")
        if touches_boundary(vals):
            raise ConfigurationError(
                f"corpus member {i} ({family}) reaches the domain boundary; widen the grid"
            )
        f = GridFunction(grid, vals)
        out.append((f, family, params) if with_params else f)
    return out


def _norms(f: GridFunction):
    if not np.any(f.values):
        raise ValueError("ratio undefined for the zero function")
    return lp_norm(f, 1), lp_norm(derivative(f), 2)


def nash_ratio(f: GridFunction) -> float:
    """``||f||_2 / (C2 ||f||_1^(2/3) ||f_x||_2^(1/3))``; at most 1 in the continuum."""
    l1, dx = _norms(f)
    return lp_norm(f, 2) / (C2 * l1 ** (2.0 / 3.0) * dx ** (1.0 / 3.0))


def sup_interp_ratio(f: GridFunction) -> float:
    """``||f||_inf / (C_inf ||f||_1^(1/3) ||f_x||_2^(2/3))``; at most 1 in the continuum."""
    l1, dx = _norms(f)
    return lp_norm(f, math.inf) / (C_INF * l1 ** (1.0 / 3.0) * dx ** (2.0 / 3.0))


@dataclass
class CorpusReport:
    count: int
    n_cells: int
    tolerance: float
    max_nash: float
    max_sup_interp: float
    argmax_nash: dict
    argmax_sup_interp: dict
    nash_histogram: dict
    sup_interp_histogram: dict
    per_family: dict

    @property
    def passed(self) -> bool:
        limit = 1.0 + self.tolerance
        return self.max_nash <= limit and self.max_sup_interp <= limit

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def _histogram(values: np.ndarray, bins: int = 20) -> dict:
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0 + 2 * TOL_INEQ))
    return {"edges": edges.tolist(), "counts": counts.tolist(),
            "above_range": int(np.sum(values > edges[-1]))}


def verify_corpus(spec: CorpusSpec, grid: Grid1D, tol_ineq: float = TOL_INEQ) -> CorpusReport:
    members = generate_corpus(spec, grid, with_params=True)
    nash = np.array([nash_ratio(f) for f, _, _ in members])
    sup = np.array([sup_interp_ratio(f) for f, _, _ in members])
    per_family = {}
    for fam in spec.families:
        idx = [i for i, (_, name, _) in enumerate(members) if name == fam]
        if idx:
            per_family[fam] = {"count": len(idx), "max_nash": float(nash[idx].max()),
                               "max_sup_interp": float(sup[idx].max())}

    def where(k):
        _, fam, params = members[k]
        return {"index": int(k), "family": fam, "params": params}

    return CorpusReport(
        count=len(members),
        n_cells=grid.n_cells,
        tolerance=tol_ineq,
        max_nash=float(nash.max()),
        max_sup_interp=float(sup.max()),
        argmax_nash=where(int(nash.argmax())),
        argmax_sup_interp=where(int(sup.argmax())),
        nash_histogram=_histogram(nash),
        sup_interp_histogram=_histogram(sup),
        per_family=per_family,
    )
