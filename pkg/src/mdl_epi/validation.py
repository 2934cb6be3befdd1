"""Input validation helpers shared by the estimator layer and the CLI."""
from __future__ import annotations

import datetime as dt

import numpy as np

from .timeseries import ReportedSeries

_EPOCH = dt.date(2020, 1, 1)


def as_reported_series(y, start_date: dt.date | None = None) -> ReportedSeries:
    """Coerce a 1-D array-like (or ReportedSeries) of daily counts.

    Arrays get a placeholder start date; real dates only matter for
    serology alignment and CSV output.
    """
    if isinstance(y, ReportedSeries):
        return y
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D daily series, got shape {arr.shape}")
    if len(arr) == 0:
        raise ValueError("series is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series contains non-finite values")
    if np.any(arr < 0):
        raise ValueError("daily counts must be nonnegative")
    return ReportedSeries(start_date=start_date or _EPOCH, daily=arr)


def check_horizon(horizon) -> int:
    h = int(horizon)
    if h < 1:
        raise ValueError("horizon must be a positive number of days")
    return h


def check_unit_interval(value, name: str, open_left=False, open_right=False) -> float:
    v = float(value)
    lo_ok = v > 0.0 if open_left else v >= 0.0
    hi_ok = v < 1.0 if open_right else v <= 1.0
    if not (lo_ok and hi_ok):
        raise ValueError(f"{name}={value} outside the unit interval")
    return v
