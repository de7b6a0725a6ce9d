"""
Trajectory records and their CSV form.

CSV layout: header ``t,l1,l2,...,linf,mass,B,beta,boundary_frac`` followed by
one row per sample, every number written with 17 significant digits so that
parsing the file gives back the same doubles. Metadata travels in a JSON
sidecar (``<name>.meta.json``) next to the CSV.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .advect import ScalarSeries

TRAILING_COLUMNS = ("linf", "mass", "B", "beta", "boundary_frac")


def norm_column(p: float) -> str:
    if math.isinf(p):
        return "linf"
    return f"l{p:g}"


def _parse_norm_column(name: str) -> float:
    return float(name[1:])


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(eq=False)
class TimeSeries:
    """Sampled trajectory diagnostics.

    ``norms`` maps each tracked finite exponent to its ``||u(t)||_p`` column.
    ``states`` optionally keeps solver snapshots at the sample times; it is
    never serialized.
    """

    times: np.ndarray
    norms: dict
    linf: np.ndarray
    mass: np.ndarray
    B: np.ndarray
    beta: np.ndarray
    boundary_frac: np.ndarray
    metadata: dict = field(default_factory=dict)
    states: tuple = ()

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        n = self.times.size
        self.norms = {float(p): np.asarray(v, dtype=float) for p, v in sorted(self.norms.items())}
        for name in TRAILING_COLUMNS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        for name, col in self._columns():
            if col.shape != (n,):
                raise ValueError(f"column {name} has shape {col.shape}, expected ({n},)")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def _columns(self):
        yield "t", self.times
        for p, col in self.norms.items():
            yield norm_column(p), col
        for name in TRAILING_COLUMNS:
            yield name, getattr(self, name)

    @property
    def column_names(self) -> list:
        return [name for name, _ in self._columns()]

    @property
    def p_values(self) -> list:
        return list(self.norms)

    @property
    def contaminated(self) -> bool:
        return bool(self.metadata.get("contaminated", False))

    def column(self, name: str) -> np.ndarray:
        for key, col in self._columns():
            if key == name:
                return col
        raise KeyError(f"no column {name!r}; have {self.column_names}")

    def norm(self, p) -> np.ndarray:
        if math.isinf(float(p)):
            return self.linf
        return self.norms[float(p)]

    def has_norm(self, p) -> bool:
        return math.isinf(float(p)) or float(p) in self.norms

    def scalar(self, name: str) -> ScalarSeries:
        return ScalarSeries(self.times, self.column(name))

    def __len__(self):
        return self.times.size

    # -- CSV -----------------------------------------------------------------

    def to_csv_text(self) -> str:
        cols = list(self._columns())
        buf = io.StringIO()
        buf.write(",".join(name for name, _ in cols) + "\n")
        data = np.column_stack([c for _, c in cols]) if len(self) else np.empty((0, len(cols)))
        for row in data:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv_text(), encoding="ascii", newline="\n")
        meta_path = path.with_suffix(".meta.json")
        meta_path.write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def from_csv_text(cls, text: str, metadata: dict | None = None) -> "TimeSeries":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = lines[0].split(",")
        if header[0] != "t" or tuple(header[-len(TRAILING_COLUMNS):]) != TRAILING_COLUMNS:
            raise ValueError(f"unexpected CSV header {lines[0]!r}")
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        data = np.array(rows, dtype=float).reshape(len(rows), len(header))
        named = dict(zip(header, data.T))
        norm_names = header[1:-len(TRAILING_COLUMNS)]
        return cls(
            times=named["t"],
            norms={_parse_norm_column(name): named[name] for name in norm_names},
            metadata=dict(metadata or {}),
            **{name: named[name] for name in TRAILING_COLUMNS},
        )

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        path = Path(path)
        meta_path = path.with_suffix(".meta.json")
        metadata = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        return cls.from_csv_text(path.read_text(encoding="ascii"), metadata)
