"""
JSON experiment configuration.

A config is one JSON object with the blocks ``grid``, ``field``, ``initial``,
``scheme``, ``run``, ``checks`` and ``output``. Keys inside each block are the
field names of the matching dataclass; unknown keys are rejected so typos
cannot silently fall back to defaults. Errors carry the line of the
offending key in the source text.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..advect import FieldSpec
from ..bounds import CheckConfig
from ..exceptions import ConfigurationError
from ..field import Grid1D, ProfileSpec, parse_exponent
from ..solver import SchemeConfig


@dataclass(frozen=True)
class RunBlock:
    t_end: float = 10.0
    sample_dt: float = 0.1
    p_list: tuple = (1.0, 2.0, math.inf)

    def __post_init__(self):
        object.__setattr__(self, "p_list", tuple(sorted({parse_exponent(p) for p in self.p_list})))
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")
        if not (self.sample_dt > 0 and self.sample_dt <= self.t_end):
            raise ConfigurationError(f"sample_dt must lie in (0, t_end], got {self.sample_dt}")
        if 1.0 not in self.p_list or math.inf not in self.p_list:
            raise ConfigurationError("p_list must contain at least 1 and inf")


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "out"
    emit_svg: bool = False


BLOCKS = {
    "grid": Grid1D,
    "field": FieldSpec,
    "initial": ProfileSpec,
    "scheme": SchemeConfig,
    "run": RunBlock,
    "checks": CheckConfig,
    "output": OutputBlock,
}
REQUIRED_BLOCKS = ("grid", "field", "initial", "run")


@dataclass(frozen=True)
class ExperimentConfig:
    grid: Grid1D
    field: FieldSpec
    initial: ProfileSpec
    scheme: SchemeConfig = SchemeConfig()
    run: RunBlock = RunBlock()
    checks: CheckConfig = CheckConfig()
    output: OutputBlock = OutputBlock()
    name: str = field(default="experiment", compare=False)

    def to_dict(self) -> dict:
        out = {}
        for block in BLOCKS:
            d = asdict(getattr(self, block))
            out[block] = _encode(d)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def config_hash(self) -> str:
        """SHA-256 over everything except the output block."""
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def replace(self, **blocks) -> "ExperimentConfig":
        """Copy with some block fields overridden, e.g. ``replace(grid={"n_cells": 8192})``."""
        kwargs = {b: getattr(self, b) for b in BLOCKS}
        for block, overrides in blocks.items():
            if block not in BLOCKS:
                raise ConfigurationError(f"unknown block {block!r}")
            current = asdict(kwargs[block])
            current.update(overrides)
            kwargs[block] = BLOCKS[block](**current)
        return ExperimentConfig(name=self.name, **kwargs)


def _encode(obj):
    if isinstance(obj, dict):
        return {k: _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


def _locate(text: str, path) -> int:
    """Line number of the key sequence ``path`` in ``text`` (1 if not found)."""
    pos = 0
    for key in path:
        m = re.compile(r'"%s"\s*:' % re.escape(str(key))).search(text, pos)
        if m is None:
            break
        pos = m.start()
    return text.count("\n", 0, pos) + 1


class ConfigError(ConfigurationError):
    """Configuration error tied to a source location."""

    def __init__(self, message: str, source: str = "<config>", line: int = 1):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


def _build_block(name: str, raw, text: str, source: str):
    cls = BLOCKS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"block {name!r} must be an object", source, _locate(text, [name]))
    allowed = {f.name for f in fields(cls)}
    for key in raw:
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in block {name!r} (allowed: {', '.join(sorted(allowed))})",
                source,
                _locate(text, [name, key]),
            )
    try:
        return cls(**raw)
    except (ConfigurationError, ValueError, TypeError) as exc:
        bad = next((k for k in raw if k in str(exc)), None)
        line = _locate(text, [name, bad] if bad else [name])
        raise ConfigError(f"{name}: {exc}", source, line) from None


def parse_config(text: str, source: str = "<config>", name: str | None = None) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", source, exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a JSON object", source, 1)
    for key in raw:
        if key not in BLOCKS:
            raise ConfigError(
                f"unknown block {key!r} (allowed: {', '.join(BLOCKS)})", source, _locate(text, [key])
            )
    for key in REQUIRED_BLOCKS:
        if key not in raw:
            raise ConfigError(f"missing required block {key!r}", source, 1)
    blocks = {key: _build_block(key, raw[key], text, source) for key in raw}
    return ExperimentConfig(name=name or Path(source).stem, **blocks)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path), 1) from None
    return parse_config(text, str(path), name=path.stem)
