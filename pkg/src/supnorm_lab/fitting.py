"""Power-law decay fits on log-log axes."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .advect import ScalarSeries

MIN_FIT_SAMPLES = 10


def fit_decay(series: ScalarSeries, window) -> tuple:
    """Fit ``value ~ C t^(-alpha)`` on ``t_lo <= t <= t_hi``.

    Returns
    -------
    exponent : float
        ``alpha``, the negated least-squares slope of ``log value`` against ``log t``.
    r_squared : float
        Coefficient of determination of the fit (1.0 for an exactly flat series).
    """
    t_lo, t_hi = window
    mask = (series.times >= t_lo) & (series.times <= t_hi) & (series.times > 0)
    t = series.times[mask]
    v = series.values[mask]
    if t.size < MIN_FIT_SAMPLES:
        raise ValueError(
            f"fit window [{t_lo}, {t_hi}] holds {t.size} samples; need {MIN_FIT_SAMPLES}"
        )
    if np.any(v <= 0):
        raise ValueError("decay fit needs strictly positive values in the window")
    logv = np.log(v)
    if np.ptp(logv) == 0.0:
        return 0.0, 1.0
    fit = stats.linregress(np.log(t), logv)
    return float(-fit.slope), float(fit.rvalue**2)
