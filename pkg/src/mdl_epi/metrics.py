"""Evaluation metrics and the machine-readable run report.

Note the error convention: rmse is the square root of the SUM of squared
errors, with no division by the series length. Ratio metrics are unchanged
by the convention, but these values are not comparable to mean-normalized
RMSEs from other toolchains.
"""
from __future__ import annotations

import csv
import datetime as dt
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ShapeError
from .models import ModelOutputs
from .timeseries import SeroEstimate, serology_comparison_date


def rmse(estimate, truth) -> float:
    """sqrt(sum of squared errors); no 1/T normalization."""
    a = np.asarray(estimate, dtype=float)
    b = np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(math.sqrt(d @ d))


def rho(rmse_base: float, rmse_mdl: float) -> float:
    """Baseline error over candidate error; above 1 favors the candidate."""
    if rmse_base < 0 or rmse_mdl < 0:
        raise ValueError("rmse values are nonnegative")
    if rmse_mdl == 0.0:
        return 1.0 if rmse_base == 0.0 else math.inf
    return rmse_base / rmse_mdl


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError("length mismatch")
    if len(a) < 2:
        raise ValueError("need at least two points for a correlation")
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return 0.0
    return float(da @ db) / denom


@dataclass(frozen=True)
class SerologyPoint:
    date: dt.date
    model_cumulative_base: float
    model_cumulative_mdl: float
    sero_point: float
    ci_low: float
    ci_high: float


def compare_serology(outputs_base: ModelOutputs, outputs_mdl: ModelOutputs,
                     sero: list[SeroEstimate], start_date: dt.date) -> list[SerologyPoint]:
    """Cumulative model totals at each estimate's lagged comparison date.

    Dates before the model timeline record zero; dates beyond the simulated
    horizon are skipped with a warning. Output order follows the input.
    """
    cum_base = np.cumsum(outputs_base.daily_total)
    cum_mdl = np.cumsum(outputs_mdl.daily_total)
    horizon = len(cum_base)
    points = []
    for estimate in sero:
        day = serology_comparison_date(estimate)
        idx = (day - start_date).days
        if idx >= horizon:
            warnings.warn(f"serology comparison date {day} beyond simulated horizon; skipped")
            continue
        base_val = 0.0 if idx < 0 else float(cum_base[idx])
        mdl_val = 0.0 if idx < 0 else float(cum_mdl[idx])
        points.append(
            SerologyPoint(
                date=day,
                model_cumulative_base=base_val,
                model_cumulative_mdl=mdl_val,
                sero_point=estimate.point,
                ci_low=estimate.ci_low,
                ci_high=estimate.ci_high,
            )
        )
    return points


@dataclass(frozen=True)
class EvalReport:
    rmse_base_reported: float
    rmse_mdl_reported: float
    rho_rinf_observed: float
    rho_rinf_forecast: float
    rho_tinf: float | None = None
    serology_points: tuple[SerologyPoint, ...] = ()
    symptomatic_trend: dict | None = None
    config_echo: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "rmse_base_reported": self.rmse_base_reported,
            "rmse_mdl_reported": self.rmse_mdl_reported,
            "rho_rinf_observed": _jsonable(self.rho_rinf_observed),
            "rho_rinf_forecast": _jsonable(self.rho_rinf_forecast),
            "config_echo": self.config_echo,
        }
        if self.rho_tinf is not None:
            payload["rho_tinf"] = _jsonable(self.rho_tinf)
        if self.serology_points:
            payload["serology_points"] = [
                {**asdict(p), "date": p.date.isoformat()} for p in self.serology_points
            ]
        if self.symptomatic_trend is not None:
            payload["symptomatic_trend"] = self.symptomatic_trend
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        raw = json.loads(text)
        points = tuple(
            SerologyPoint(
                date=dt.date.fromisoformat(p["date"]),
                model_cumulative_base=p["model_cumulative_base"],
                model_cumulative_mdl=p["model_cumulative_mdl"],
                sero_point=p["sero_point"],
                ci_low=p["ci_low"],
                ci_high=p["ci_high"],
            )
            for p in raw.get("serology_points", [])
        )
        return cls(
            rmse_base_reported=raw["rmse_base_reported"],
            rmse_mdl_reported=raw["rmse_mdl_reported"],
            rho_rinf_observed=_unjsonable(raw["rho_rinf_observed"]),
            rho_rinf_forecast=_unjsonable(raw["rho_rinf_forecast"]),
            rho_tinf=_unjsonable(raw["rho_tinf"]) if "rho_tinf" in raw else None,
            serology_points=points,
            symptomatic_trend=raw.get("symptomatic_trend"),
            config_echo=raw.get("config_echo", {}),
        )


def _jsonable(x: float):
    return "inf" if math.isinf(x) else x


def _unjsonable(x):
    return math.inf if x == "inf" else x


def build_report(rmse_base_reported: float, rmse_mdl_reported: float,
                 rho_rinf_observed: float, rho_rinf_forecast: float,
                 rho_tinf: float | None = None,
                 serology_points=(), symptomatic_trend: dict | None = None,
                 config_echo: dict | None = None) -> EvalReport:
    return EvalReport(
        rmse_base_reported=rmse_base_reported,
        rmse_mdl_reported=rmse_mdl_reported,
        rho_rinf_observed=rho_rinf_observed,
        rho_rinf_forecast=rho_rinf_forecast,
        rho_tinf=rho_tinf,
        serology_points=tuple(serology_points),
        symptomatic_trend=symptomatic_trend,
        config_echo=dict(config_echo or {}),
    )


def write_tidy_csv(path, series_map: dict[str, np.ndarray], start_date: dt.date):
    """Dump named daily series as `series,date,value` rows for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["series", "date", "value"])
        for name in sorted(series_map):
            values = np.asarray(series_map[name], dtype=float)
            for i, v in enumerate(values):
                writer.writerow([name, (start_date + dt.timedelta(days=i)).isoformat(), repr(float(v))])
