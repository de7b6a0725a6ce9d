"""
Closed-form constants, the a priori estimates, and a checker that confronts
them with computed trajectories.

Constants
---------
``C2 = (3 sqrt(3) / (4 pi))^(1/3)`` is the sharp constant of the 1-D Nash
inequality ``||v||_2 <= C2 ||v||_1^(2/3) ||v_x||_2^(1/3)``;
``C_INF = (3/4)^(2/3)`` is the constant of
``||v||_inf <= C_INF ||v||_1^(1/3) ||v_x||_2^(2/3)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .advect import DEFAULT_WINDOW_FRACTION, FieldSpec, ScalarSeries, tail_limsup
from .exceptions import ConfigurationError, ContaminationError
from .fitting import fit_decay
from .series import TimeSeries

C2_CUBED = 3.0 * math.sqrt(3.0) / (4.0 * math.pi)
C2 = C2_CUBED ** (1.0 / 3.0)
C_INF = 0.75 ** (2.0 / 3.0)


@dataclass(frozen=True)
class Constants:
    c2: float = C2
    c_inf: float = C_INF


def _require(cond: bool, message: str):
    if not cond:
        raise ValueError(message)


def main_constant(p: float) -> float:
    """``(3 sqrt(3) p / (2 pi))^(1/p)``, the prefactor of the asymptotic supnorm bound."""
    _require(p >= 1, f"p must be >= 1, got {p}")
    return (3.0 * math.sqrt(3.0) * p / (2.0 * math.pi)) ** (1.0 / p)


def moser_partial_constant(k: int, l: int, p: float) -> float:
    """Product ``prod_{j=l+1}^{k} (2^(j-1) p C2^3)^(2^-j)``, evaluated in log space.

    Raising ``moser_partial_constant(k, 0, p)`` to ``1/p`` and letting
    ``k -> inf`` recovers :func:`main_constant`.
    """
    _require(int(k) == k and k >= 1, f"k must be an integer >= 1, got {k}")
    _require(int(l) == l and 0 <= l <= k - 1, f"l must satisfy 0 <= l <= k-1, got l={l}, k={k}")
    _require(p >= 1, f"p must be >= 1, got {p}")
    log_base = math.log(p * C2_CUBED)
    total = math.fsum(
        2.0 ** (-j) * ((j - 1) * math.log(2.0) + log_base) for j in range(int(l) + 1, int(k) + 1)
    )
    return math.exp(total)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _integral_b_squared(b_series: ScalarSeries, t: float) -> float:
    times, values = b_series.times, b_series.values
    keep = times <= t
    tt = np.append(times[keep], t)
    vv = np.append(values[keep] ** 2, np.interp(t, times, values**2))
    return float(trapezoid(vv, tt)) if tt.size > 1 else 0.0


def gronwall_bound(q: float, u0_q_norm: float, b_series: ScalarSeries, t: float) -> float:
    """``||u0||_q exp(0.5 (q - 1) int_0^t B^2)``, trapezoidal in the sampled ``B``."""
    _require(q >= 1, f"q must be >= 1, got {q}")
    _require(len(b_series) > 0, "empty oscillation series")
    _require(
        b_series.times[0] <= t <= b_series.times[-1],
        f"t={t} outside sampled range [{b_series.times[0]}, {b_series.times[-1]}]",
    )
    if q == 1:
        return float(u0_q_norm)
    return u0_q_norm * _safe_exp(0.5 * (q - 1.0) * _integral_b_squared(b_series, t))


def growth_time_bound_lq(q: float, b_t: float, u_half_norm: float) -> float:
    """Ceiling on ``||u||_q`` at an instant where ``||u||_q^q`` is not decreasing."""
    _require(q >= 2, f"q must be >= 2, got {q}")
    _require(b_t >= 0 and u_half_norm >= 0, "oscillation and norm must be non-negative")
    return (0.5 * q * C2_CUBED) ** (1.0 / q) * b_t ** (1.0 / q) * u_half_norm


def growth_time_bound_sup(q: float, b_t: float, u_half_norm: float) -> float:
    """Ceiling on ``||u||_inf`` at an instant where ``||u||_q^q`` is not decreasing."""
    _require(q >= 2, f"q must be >= 2, got {q}")
    _require(b_t >= 0 and u_half_norm >= 0, "oscillation and norm must be non-negative")
    return (0.5 * q * C2 * C_INF) ** (2.0 / q) * b_t ** (2.0 / q) * u_half_norm


def bootstrap_bound(q: float, u_t0_q_norm: float, b_sup: float, u_half: float) -> float:
    """Bound on ``sup_{[t0, t]} ||u||_q`` from its value at ``t0`` and the ``L^{q/2}`` running sup."""
    _require(q >= 2, f"q must be >= 2, got {q}")
    return max(u_t0_q_norm, (0.5 * q * C2_CUBED) ** (1.0 / q) * b_sup ** (1.0 / q) * u_half)


def supnorm_bound(p: float, u_t0_sup: float, b_sup: float, u_p: float) -> float:
    """``(2p)^(1/p) max{||u(t0)||_inf, B^(1/p) U_p}`` bounding ``||u(t)||_inf`` for ``t >= t0``."""
    _require(p >= 1, f"p must be >= 1, got {p}")
    return (2.0 * p) ** (1.0 / p) * max(u_t0_sup, b_sup ** (1.0 / p) * u_p)


def asymptotic_bound(p: float, b_limsup: float, u_p_limsup: float) -> float:
    """``main_constant(p) B^(1/p) U_p`` bounding ``limsup ||u||_inf``; ``0 * inf = inf``."""
    _require(b_limsup >= 0 and u_p_limsup >= 0, "inputs must be non-negative")
    if math.isinf(u_p_limsup) or math.isinf(b_limsup):
        return math.inf
    return main_constant(p) * b_limsup ** (1.0 / p) * u_p_limsup


def monotone_decay_bound(p0: float, u0_p0_norm: float, t: float) -> float:
    """``2^(-1/p0) ||u0||_{p0} t^(-1/(2 p0))``, valid when ``b_x >= 0``."""
    _require(t > 0, f"t must be positive, got {t}")
    _require(p0 >= 1, f"p0 must be >= 1, got {p0}")
    return 2.0 ** (-1.0 / p0) * u0_p0_norm * t ** (-1.0 / (2.0 * p0))


# -- trajectory checks ---------------------------------------------------------

ALL_CHECKS = (
    "mass_conservation",
    "l1_contraction",
    "gronwall",
    "growth_time",
    "bootstrap",
    "supnorm_uniform",
    "asymptotic",
    "monotone_decay",
)


@dataclass(frozen=True)
class CheckConfig:
    """Which checks to run and at what tolerance.

    ``tol_disc`` is the normalized-margin slack granted to trajectory checks;
    ``tol_conservation`` applies to the roundoff-level structural checks.
    """

    enabled: tuple = ALL_CHECKS
    tol_disc: float = 2e-2
    tol_conservation: float = 1e-10
    window_fraction: float = DEFAULT_WINDOW_FRACTION
    growth_deadband: float = 1e-9
    max_t0: int = 64
    p0: float = 1.0
    decay_window: tuple | None = None
    decay_rate_slack: float = 0.05
    decay_bound_tol: float = 5e-2
    min_r_squared: float = 0.98
    monotone: bool | None = None

    def __post_init__(self):
        object.__setattr__(self, "enabled", tuple(self.enabled))
        unknown = set(self.enabled) - set(ALL_CHECKS)
        if unknown:
            raise ConfigurationError(f"unknown checks {sorted(unknown)}; choose from {ALL_CHECKS}")
        if self.decay_window is not None:
            object.__setattr__(self, "decay_window", tuple(float(v) for v in self.decay_window))


@dataclass
class CheckResult:
    name: str
    relation: str
    tolerance: float
    worst_margin: float | None
    worst_time: float | None = None
    n_evaluated: int = 0
    t_range: tuple | None = None
    status: str = "pass"
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


@dataclass
class BoundReport:
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list:
        return [c.name for c in self.checks]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "metadata": self.metadata,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"

    def summary_lines(self) -> list:
        lines = []
        for c in self.checks:
            margin = "n/a" if c.worst_margin is None else f"{c.worst_margin:+.3e}"
            lines.append(f"{c.status.upper():13s} {c.name:34s} margin={margin} tol={c.tolerance:.1e}")
        return lines


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def normalized_margin(bound, observed) -> np.ndarray:
    """``(bound - observed) / bound`` with ``0/0 -> 0``, ``x/0 -> -inf``, ``x/inf -> 1``."""
    bound = np.asarray(bound, dtype=float)
    observed = np.asarray(observed, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (bound - observed) / bound
    m = np.where(np.isinf(bound), 1.0, m)
    m = np.where((bound == 0) & (observed <= 0), 0.0, m)
    m = np.where((bound == 0) & (observed > 0), -np.inf, m)
    return m


def _result(name, relation, tol, margins, times, **metadata) -> CheckResult:
    margins = np.asarray(margins, dtype=float)
    times = np.asarray(times, dtype=float)
    if margins.size == 0:
        return CheckResult(name, relation, tol, None, status="pass", metadata=metadata)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return CheckResult(
        name,
        relation,
        tol,
        worst,
        worst_time=float(times[k]),
        n_evaluated=int(margins.size),
        t_range=(float(times.min()), float(times.max())),
        status="pass" if worst >= -tol else "fail",
        metadata=metadata,
    )


def _lattice(n: int, count: int) -> np.ndarray:
    return np.unique(np.linspace(0, n - 1, min(n, count)).round().astype(int))


def _field_from_metadata(series: TimeSeries):
    spec = series.metadata.get("field")
    if isinstance(spec, dict):
        return FieldSpec(**spec)
    return None


def _half_pairs(series: TimeSeries):
    """Exponents ``q >= 2`` tracked together with ``q / 2``."""
    return [q for q in series.p_values if q >= 2 and series.has_norm(q / 2)]


def gronwall_envelope(q: float, u0_q_norm: float, times, b_values) -> np.ndarray:
    """Log of the Gronwall bound at every sample time."""
    integral = cumulative_trapezoid(np.asarray(b_values) ** 2, times, initial=0.0)
    with np.errstate(divide="ignore"):
        return np.log(u0_q_norm) + 0.5 * (q - 1.0) * integral


def check_report(series: TimeSeries, params: CheckConfig | None = None) -> BoundReport:
    """Evaluate every enabled estimate along ``series``.

    Raises
    ------
    ContaminationError
        If the trajectory reached the edge strip of the truncated domain.
    """
    params = params or CheckConfig()
    if series.contaminated:
        raise ContaminationError(
            "trajectory carried mass into the domain edge strip; "
            "enlarge [x_min, x_max] (or shorten t_end) and rerun"
        )
    if len(series) < 2:
        raise ValueError("need at least two samples")
    t = series.times
    B = series.B
    tol = params.tol_disc
    wf = params.window_fraction
    report = BoundReport(
        metadata={
            "window_fraction": wf,
            "grid": series.metadata.get("grid"),
            "scheme": series.metadata.get("scheme"),
            "n_samples": len(series),
            "asymptotic_checks": f"finite-horizon surrogate (tail window {wf:g} of the run)",
        }
    )
    add = report.checks.append
    enabled = set(params.enabled)
    l1 = series.norm(1)

    if "mass_conservation" in enabled:
        m0 = series.mass[0]
        drift = np.abs(series.mass - m0) / max(abs(m0), np.finfo(float).tiny)
        add(_result("mass_conservation", "|mass(t) - mass(0)| <= tol |mass(0)|",
                    params.tol_conservation, -drift, t))

    if "l1_contraction" in enabled:
        margins = normalized_margin(l1[:-1], l1[1:])
        add(_result("l1_contraction", "||u(t_k+1)||_1 <= ||u(t_k)||_1",
                    params.tol_conservation, margins, t[1:]))

    if "gronwall" in enabled:
        for q in series.p_values:
            uq = series.norm(q)
            log_bound = gronwall_envelope(q, uq[0], t, B)
            with np.errstate(divide="ignore", invalid="ignore"):
                log_ratio = np.log(uq) - log_bound
            log_ratio = np.nan_to_num(log_ratio, nan=0.0, posinf=700.0)
            margins = 1.0 - np.exp(np.minimum(log_ratio, 700.0))
            add(_result(f"gronwall_q{q:g}",
                        "||u(t)||_q <= ||u(0)||_q exp(0.5 (q-1) int_0^t B^2)",
                        tol, margins, t, q=q))

    if "growth_time" in enabled:
        for q in _half_pairs(series):
            uq = series.norm(q)
            power = uq**q
            grows = (power[1:] - power[:-1]) > params.growth_deadband * power[:-1]
            idx = np.nonzero(grows)[0]
            half = series.norm(q / 2)[idx]
            lq_bound = np.array([growth_time_bound_lq(q, B[k], h) for k, h in zip(idx, half)])
            sup_bound = np.array([growth_time_bound_sup(q, B[k], h) for k, h in zip(idx, half)])
            add(_result(f"growth_time_lq_q{q:g}",
                        "||u||_q <= ((q/2) C2^3 B)^(1/q) ||u||_(q/2) where d/dt ||u||_q^q >= 0",
                        tol, normalized_margin(lq_bound, uq[idx]), t[idx], q=q))
            add(_result(f"growth_time_sup_q{q:g}",
                        "||u||_inf <= ((q/2) C2 C_inf B)^(2/q) ||u||_(q/2) where d/dt ||u||_q^q >= 0",
                        tol, normalized_margin(sup_bound, series.linf[idx]), t[idx], q=q))

    lattice = _lattice(len(series), params.max_t0)

    if "bootstrap" in enabled:
        for q in _half_pairs(series):
            uq, uh = series.norm(q), series.norm(q / 2)
            coef = (0.5 * q * C2_CUBED) ** (1.0 / q)
            margins, times = [], []
            for i0 in lattice:
                run_uq = np.maximum.accumulate(uq[i0:])
                run_b = np.maximum.accumulate(B[i0:])
                run_uh = np.maximum.accumulate(uh[i0:])
                bound = np.maximum(uq[i0], coef * run_b ** (1.0 / q) * run_uh)
                margins.append(normalized_margin(bound, run_uq))
                times.append(t[i0:])
            add(_result(f"bootstrap_q{q:g}",
                        "sup_[t0,t] ||u||_q <= max{||u(t0)||_q, ((q/2) C2^3)^(1/q) sup B^(1/q) sup ||u||_(q/2)}",
                        tol, np.concatenate(margins), np.concatenate(times), q=q,
                        n_t0=int(lattice.size)))

    if "supnorm_uniform" in enabled:
        for p in series.p_values:
            up = series.norm(p)
            margins, times = [], []
            for i0 in lattice:
                run_b = np.maximum.accumulate(B[i0:])
                run_up = np.maximum.accumulate(up[i0:])
                bound = (2.0 * p) ** (1.0 / p) * np.maximum(series.linf[i0], run_b ** (1.0 / p) * run_up)
                margins.append(normalized_margin(bound, series.linf[i0:]))
                times.append(t[i0:])
            add(_result(f"supnorm_uniform_p{p:g}",
                        "||u(t)||_inf <= (2p)^(1/p) max{||u(t0)||_inf, sup B^(1/p) sup ||u||_p}",
                        tol, np.concatenate(margins), np.concatenate(times), p=p,
                        n_t0=int(lattice.size)))

    if "asymptotic" in enabled:
        b_tail = tail_limsup(series.scalar("B"), wf)
        sup_tail = tail_limsup(series.scalar("linf"), wf)
        tail_start = t[-1] - wf * (t[-1] - t[0])
        candidates = [(f"asymptotic_p{p:g}", p, tail_limsup(series.scalar(f"l{p:g}"), wf))
                      for p in series.p_values]
        candidates.append(("asymptotic_l1_initial", 1.0, float(l1[0])))
        for name, p, u_p in candidates:
            meta = dict(p=p, B_tail=b_tail, U_p=u_p, window_fraction=wf,
                        label="finite-horizon surrogate")
            if b_tail <= 1e-14:
                # limsup bound is 0 here; a finite horizon cannot witness it
                add(CheckResult(name, "limsup ||u||_inf <= K(p) B^(1/p) U_p", tol, None,
                                status="indeterminate", metadata=meta))
                continue
            bound = asymptotic_bound(p, b_tail, u_p)
            add(_result(name, "limsup ||u||_inf <= K(p) B^(1/p) U_p", tol,
                        normalized_margin([bound], [sup_tail]), [tail_start], bound=bound, **meta))

    monotone = params.monotone
    if monotone is None:
        spec = _field_from_metadata(series)
        monotone = bool(spec is not None and spec.is_monotone)
    if "monotone_decay" in enabled and monotone:
        p0 = params.p0
        if series.has_norm(p0):
            report.checks.extend(_monotone_checks(series, params))
    return report


def _monotone_checks(series: TimeSeries, params: CheckConfig) -> list:
    p0 = params.p0
    t = series.times
    u0 = float(series.norm(p0)[0])
    window = params.decay_window or (0.5 * t[-1], t[-1])
    pos = t > 0
    bound = np.array([monotone_decay_bound(p0, u0, s) for s in t[pos]])
    results = [
        _result("monotone_decay_bound",
                "||u(t)||_inf <= 2^(-1/p0) ||u0||_p0 t^(-1/(2 p0))",
                params.decay_bound_tol, normalized_margin(bound, series.linf[pos]),
                t[pos], p0=p0),
    ]
    target = 1.0 / (2.0 * p0)
    relation = "fitted supnorm decay exponent >= 1/(2 p0)"
    tol = params.decay_rate_slack / target
    try:
        exponent, r2 = fit_decay(series.scalar("linf"), window)
    except ValueError as exc:
        results.append(CheckResult("monotone_decay_rate", relation, tol, None,
                                   status="indeterminate",
                                   metadata=dict(p0=p0, window=list(window), reason=str(exc))))
        return results
    meta = dict(p0=p0, window=list(window), exponent=exponent, r_squared=r2,
                target=target, min_r_squared=params.min_r_squared)
    res = _result("monotone_decay_rate", relation, tol, [(exponent - target) / target],
                  [window[1]], **meta)
    if r2 < params.min_r_squared:
        res.status = "fail"
    results.append(res)
    return results
