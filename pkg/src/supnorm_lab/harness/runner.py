"""Run one experiment end to end and persist its artifacts."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..bounds import BoundReport, check_report
from ..exceptions import ContaminationError, StabilityError
from ..series import TimeSeries
from ..solver import integrate
from .config import ExperimentConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_STABILITY = 3
EXIT_CONTAMINATED = 4


@dataclass
class RunOutcome:
    exit_code: int
    series: TimeSeries | None = None
    report: BoundReport | None = None
    paths: dict = field(default_factory=dict)
    message: str = ""


def simulate(config: ExperimentConfig, **kwargs) -> TimeSeries:
    """Integrate ``config`` and return its series; extra kwargs go to :func:`integrate`."""
    return integrate(
        config.grid,
        config.field,
        config.initial,
        config.scheme,
        config.run.t_end,
        config.run.sample_dt,
        config.run.p_list,
        metadata={"config_hash": config.config_hash, "name": config.name},
        **kwargs,
    )


def run(config: ExperimentConfig, out_dir=None, **kwargs) -> RunOutcome:
    """Simulate, check, and write ``series.csv``, ``series.meta.json``,
    ``report.json`` (and SVG plots when enabled) into ``out_dir``.

    The exit code is 0 only if every enabled check passed and the run stayed
    clear of the domain edges.
    """
    out = Path(out_dir if out_dir is not None else config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(config.to_json())
    try:
        series = simulate(config, **kwargs)
    except StabilityError as exc:
        log.error("stability failure: %s", exc)
        return RunOutcome(EXIT_STABILITY, message=str(exc))

    paths = {"series": series.to_csv(out / "series.csv")}
    if config.output.emit_svg:
        from .plots import write_norm_plots

        paths["plots"] = write_norm_plots(series, out)

    try:
        report = check_report(series, config.checks)
    except ContaminationError as exc:
        log.error("%s", exc)
        return RunOutcome(EXIT_CONTAMINATED, series=series, paths=paths, message=str(exc))

    report.metadata["config_hash"] = config.config_hash
    report.metadata["name"] = config.name
    paths["report"] = out / "report.json"
    paths["report"].write_text(report.to_json())
    code = EXIT_OK if report.passed else EXIT_CHECKS_FAILED
    return RunOutcome(code, series=series, report=report, paths=paths)
