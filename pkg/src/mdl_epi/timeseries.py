"""Ingestion, cleaning and alignment of the input time series.

All series are daily, gap-free and anchored to a start date; downstream
code works with day offsets from that anchor.
"""
from __future__ import annotations

import csv
import datetime as dt
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSplit, NotFound

SEROLOGY_LAG_DAYS = 7
DEFAULT_SUBPERIOD_DAYS = 60


def _freeze(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ReportedSeries:
    """Daily new reported infections (persons/day), consecutive days."""

    start_date: dt.date
    daily: np.ndarray
    region_id: str = ""

    def __post_init__(self):
        arr = _freeze(self.daily, "daily")
        if len(arr) < 1:
            raise ValueError("series must contain at least one day")
        if np.any(arr < 0):
            raise ValueError("daily reported counts must be nonnegative")
        object.__setattr__(self, "daily", arr)

    def __len__(self) -> int:
        return len(self.daily)

    @property
    def end_date(self) -> dt.date:
        return self.start_date + dt.timedelta(days=len(self.daily) - 1)

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=i) for i in range(len(self.daily))]

    def day_index(self, day: dt.date) -> int:
        return (day - self.start_date).days


@dataclass(frozen=True)
class CumulativeSeries:
    """Cumulative counts as published (non-decreasing)."""

    start_date: dt.date
    cumulative: np.ndarray
    region_id: str = ""

    def __post_init__(self):
        arr = _freeze(self.cumulative, "cumulative")
        if len(arr) < 1:
            raise ValueError("series must contain at least one day")
        if np.any(np.diff(arr) < 0):
            raise ValueError("cumulative series must be non-decreasing")
        if np.any(arr < 0):
            raise ValueError("cumulative counts must be nonnegative")
        object.__setattr__(self, "cumulative", arr)

    def __len__(self) -> int:
        return len(self.cumulative)


@dataclass(frozen=True)
class SeroEstimate:
    """One serological point estimate of cumulative total infections."""

    collection_start: dt.date
    collection_end: dt.date
    point: float
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if self.collection_end < self.collection_start:
            raise ValueError("collection_end precedes collection_start")
        if not (self.ci_low <= self.point <= self.ci_high):
            raise ValueError("point estimate must lie inside its interval")
        if self.point < 0:
            raise ValueError("point estimate must be nonnegative")


@dataclass(frozen=True)
class SymptomaticSurvey:
    """Surveyed fraction of the population with symptoms, daily."""

    start_date: dt.date
    rate: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        rate = _freeze(self.rate, "rate")
        err = _freeze(self.stderr, "stderr")
        if len(rate) != len(err):
            raise ValueError("rate and stderr must have equal length")
        if np.any((rate < 0) | (rate > 1)):
            raise ValueError("rates must lie in [0, 1]")
        if np.any(err < 0):
            raise ValueError("standard errors must be nonnegative")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "stderr", err)

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=i) for i in range(len(self.rate))]


@dataclass(frozen=True)
class PeriodSplit:
    """Observed/forecast split plus optional sub-period boundaries."""

    observed_end: dt.date
    subperiod_boundaries: tuple[dt.date, ...] = field(default=())

    def __post_init__(self):
        bounds = tuple(self.subperiod_boundaries)
        for a, b in zip(bounds, bounds[1:]):
            if b <= a:
                raise ValueError("sub-period boundaries must be strictly increasing")
        if any(b > self.observed_end for b in bounds):
            raise ValueError("sub-period boundaries must not exceed observed_end")
        object.__setattr__(self, "subperiod_boundaries", bounds)


def load_cumulative_csv(path, region_id: str, value_column: str = "cases") -> CumulativeSeries:
    """Read a `date,region,cases,deaths` CSV and return one region's series.

    Missing dates are filled by carrying the last cumulative value forward.
    Rows that drop below the running maximum (reporting corrections) are
    clamped to it, each with a warning.
    """
    rows: list[tuple[dt.date, float]] = []
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise NotFound(f"cannot open {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or value_column not in reader.fieldnames:
            raise NotFound(f"{path} has no '{value_column}' column")
        for row in reader:
            if row["region"] != region_id:
                continue
            rows.append((dt.date.fromisoformat(row["date"]), float(row[value_column])))
    if not rows:
        raise NotFound(f"region {region_id!r} not present in {path}")
    rows.sort(key=lambda r: r[0])

    start = rows[0][0]
    horizon = (rows[-1][0] - start).days + 1
    values = np.empty(horizon, dtype=float)
    by_date = dict(rows)
    running = 0.0
    for i in range(horizon):
        day = start + dt.timedelta(days=i)
        if day in by_date:
            v = by_date[day]
            if v < running:
                warnings.warn(
                    f"{region_id} {day}: cumulative {value_column} dropped "
                    f"({v} < {running}); clamped to running max"
                )
                v = running
            running = v
        values[i] = running
    return CumulativeSeries(start_date=start, cumulative=values, region_id=region_id)


def load_serology_csv(path) -> list[SeroEstimate]:
    """Read `collection_start,collection_end,point,ci_low,ci_high` rows."""
    out = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            out.append(
                SeroEstimate(
                    collection_start=dt.date.fromisoformat(row["collection_start"]),
                    collection_end=dt.date.fromisoformat(row["collection_end"]),
                    point=float(row["point"]),
                    ci_low=float(row["ci_low"]),
                    ci_high=float(row["ci_high"]),
                )
            )
    return out


def load_survey_csv(path) -> SymptomaticSurvey:
    """Read `date,rate,stderr` rows covering consecutive days."""
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            rows.append((dt.date.fromisoformat(row["date"]), float(row["rate"]), float(row["stderr"])))
    rows.sort(key=lambda r: r[0])
    if not rows:
        raise NotFound(f"no survey rows in {path}")
    for (a, _, _), (b, _, _) in zip(rows, rows[1:]):
        if (b - a).days != 1:
            raise ValueError(f"survey dates must be consecutive; gap after {a}")
    return SymptomaticSurvey(
        start_date=rows[0][0],
        rate=np.array([r for _, r, _ in rows]),
        stderr=np.array([e for _, _, e in rows]),
    )


def to_daily(c: CumulativeSeries) -> ReportedSeries:
    """First difference of a cumulative series; day 0 keeps its own value."""
    daily = np.diff(c.cumulative, prepend=0.0)
    return ReportedSeries(start_date=c.start_date, daily=daily, region_id=c.region_id)


def smooth_14(s: ReportedSeries, window: int = 14) -> ReportedSeries:
    """Trailing mean over up to `window` days ending at each day.

    The window is trailing, not centered, so a day's smoothed value never
    depends on data after it and the observed/forecast split stays clean.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    csum = np.concatenate(([0.0], np.cumsum(s.daily)))
    t = np.arange(len(s.daily))
    lo = np.maximum(0, t - (window - 1))
    out = (csum[t + 1] - csum[lo]) / (t + 1 - lo)
    return ReportedSeries(start_date=s.start_date, daily=np.maximum(out, 0.0), region_id=s.region_id)


def split_observed_forecast(s: ReportedSeries, split: PeriodSplit) -> tuple[ReportedSeries, ReportedSeries | None]:
    """Cut the series after `observed_end` (inclusive on the observed side).

    Returns (observed, forecast); forecast is None when the split lands on
    the final day, since a series cannot be empty. Concatenating the two
    parts reproduces the input exactly.
    """
    idx = s.day_index(split.observed_end)
    if idx < 0 or idx >= len(s):
        raise InvalidSplit(
            f"observed_end {split.observed_end} outside series range "
            f"{s.start_date}..{s.end_date}"
        )
    observed = ReportedSeries(s.start_date, s.daily[: idx + 1], s.region_id)
    if idx + 1 == len(s):
        return observed, None
    forecast = ReportedSeries(
        split.observed_end + dt.timedelta(days=1), s.daily[idx + 1 :], s.region_id
    )
    return observed, forecast


def serology_comparison_date(e: SeroEstimate) -> dt.date:
    """Date at which model cumulative totals are compared to the estimate.

    Seven days before the first specimen-collection day, accounting for the
    antibody detection lag. If this precedes the model timeline, callers
    treat the model cumulative as 0 there.
    """
    return e.collection_start - dt.timedelta(days=SEROLOGY_LAG_DAYS)


def default_subperiods(start_date: dt.date, observed_end: dt.date,
                       block_days: int = DEFAULT_SUBPERIOD_DAYS) -> PeriodSplit:
    """Split the observed period into fixed-size blocks (default 60 days)."""
    boundaries = []
    day = start_date + dt.timedelta(days=block_days)
    while day <= observed_end:
        boundaries.append(day)
        day += dt.timedelta(days=block_days)
    return PeriodSplit(observed_end=observed_end, subperiod_boundaries=tuple(boundaries))
