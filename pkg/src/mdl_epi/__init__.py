"""Latent total-infection inference for compartmental epidemic models.

Calibrates an ODE model to reported case counts, then selects the daily
total-infection series (reported plus unreported) whose two-part
description length is smallest, and uses the selected parametrization for
forecasting and counterfactual isolation scenarios.
"""

from .calibration import (
    CalibrationConfig,
    CalibrationResult,
    base_infer,
    candidate_calibrate,
)
from .encoding import (
    EncodingConfig,
    cost_int,
    cost_real,
    cost_seq_diff,
    cost_uint,
    cost_vector,
    log_star,
)
from .errors import MdlEpiError
from .estimators import BaseInferEstimator, MdlInferEstimator
from .mdl import (
    CostBreakdown,
    LatentTotalSeries,
    MdlResult,
    grid_search_alpha,
    mdl_infer,
    refine_total_series,
    total_cost,
)
from .metrics import EvalReport, build_report, compare_serology, rho, rmse
from .models import (
    SAPHIRE,
    SEIR_HD,
    EpiModel,
    ModelOutputs,
    Parametrization,
    build_model,
    cumulative_reported_rate,
    reported_rate_of,
    simulate_outputs,
    symptomatic_rate,
)
from .scenarios import ScenarioResult, ScenarioSpec, apply_npi, run_scenario_suite
from .timeseries import (
    CumulativeSeries,
    PeriodSplit,
    ReportedSeries,
    SeroEstimate,
    SymptomaticSurvey,
    load_cumulative_csv,
    serology_comparison_date,
    smooth_14,
    split_observed_forecast,
    to_daily,
)

__version__ = "0.1.0"

__all__ = [
    "BaseInferEstimator",
    "CalibrationConfig",
    "CalibrationResult",
    "CostBreakdown",
    "CumulativeSeries",
    "EncodingConfig",
    "EpiModel",
    "EvalReport",
    "LatentTotalSeries",
    "MdlEpiError",
    "MdlInferEstimator",
    "MdlResult",
    "ModelOutputs",
    "Parametrization",
    "PeriodSplit",
    "ReportedSeries",
    "SAPHIRE",
    "SEIR_HD",
    "ScenarioResult",
    "ScenarioSpec",
    "SeroEstimate",
    "SymptomaticSurvey",
    "apply_npi",
    "base_infer",
    "build_model",
    "build_report",
    "candidate_calibrate",
    "compare_serology",
    "cost_int",
    "cost_real",
    "cost_seq_diff",
    "cost_uint",
    "cost_vector",
    "cumulative_reported_rate",
    "grid_search_alpha",
    "load_cumulative_csv",
    "log_star",
    "mdl_infer",
    "refine_total_series",
    "reported_rate_of",
    "rho",
    "rmse",
    "run_scenario_suite",
    "serology_comparison_date",
    "simulate_outputs",
    "smooth_14",
    "split_observed_forecast",
    "symptomatic_rate",
    "to_daily",
    "total_cost",
]
