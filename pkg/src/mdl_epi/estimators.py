"""Estimator-style front end: fit on a reported series, predict forward.

Both estimators follow the scikit-learn parameter protocol (get_params /
set_params / clone), validate inputs in fit rather than __init__, and
expose fitted state through trailing-underscore attributes.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator

from .calibration import CalibrationConfig, base_infer, candidate_calibrate
from .encoding import EncodingConfig
from .errors import MdlEpiError
from .mdl import mdl_infer
from .models import build_model, simulate_outputs
from .validation import as_reported_series, check_horizon


class _SeriesEstimator(BaseEstimator):
    """Shared plumbing: model construction and forecast simulation."""

    def _build_model(self):
        from .config import load_model_params

        params = None
        if self.model_params is not None:
            params = (self.model_params
                      if hasattr(self.model_params, "for_family")
                      else load_model_params(self.model_params))
        return build_model(
            self.model, params=params,
            subperiod_days=tuple(self.subperiod_days or ()),
        )

    def _calibration_config(self, objective):
        return CalibrationConfig(
            objective=objective,
            max_iters=self.max_iters,
            restarts=self.restarts,
            rng_seed=self.seed,
            convergence_tol=self.convergence_tol,
        )

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise MdlEpiError("estimator is not fitted; call fit first")

    def _forecast(self, theta, horizon):
        self._check_fitted()
        horizon = check_horizon(horizon)
        out = simulate_outputs(self.model_, theta, self.n_observed_ + horizon)
        return out.daily_reported

    def simulate(self, horizon=None):
        """Full model outputs over the observed period plus `horizon` days."""
        self._check_fitted()
        extra = 0 if horizon is None else check_horizon(horizon)
        return simulate_outputs(self.model_, self.best_theta_, self.n_observed_ + extra)


class BaseInferEstimator(_SeriesEstimator):
    """Baseline practice: calibrate to reported counts alone.

    The reported rate is read off the fitted parameters, so it inherits
    whatever scale ambiguity the reported-only fit leaves unresolved.
    """

    def __init__(self, model="seir_hd", model_params=None, restarts=4,
                 max_iters=300, seed=0, convergence_tol=1e-8, subperiod_days=()):
        self.model = model
        self.model_params = model_params
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.convergence_tol = convergence_tol
        self.subperiod_days = subperiod_days

    def fit(self, y, X=None):
        """Fit to a 1-D daily reported series (or ReportedSeries)."""
        series = as_reported_series(y)
        self.model_ = self._build_model()
        result = base_infer(self.model_, series, self._calibration_config("fit_reported"))
        self.theta_hat_ = result.theta
        self.loss_ = result.loss
        self.converged_ = result.converged
        self.n_observed_ = len(series)
        self.observed_ = series
        return self

    @property
    def best_theta_(self):
        self._check_fitted()
        return self.theta_hat_

    def predict(self, horizon=0):
        """Simulated daily reported series for observed + `horizon` days."""
        if horizon == 0:
            self._check_fitted()
            return simulate_outputs(self.model_, self.theta_hat_, self.n_observed_).daily_reported
        return self._forecast(self.theta_hat_, horizon)


class MdlInferEstimator(_SeriesEstimator):
    """Two-part description-length selection of the total-infection series."""

    def __init__(self, model="seir_hd", model_params=None, restarts=4,
                 max_iters=300, seed=0, convergence_tol=1e-8, delta=0.01,
                 jobs=1, subperiod_days=()):
        self.model = model
        self.model_params = model_params
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed
        self.convergence_tol = convergence_tol
        self.delta = delta
        self.jobs = jobs
        self.subperiod_days = subperiod_days

    def fit(self, y, X=None):
        """Run the full two-step search on a daily reported series."""
        series = as_reported_series(y)
        self.model_ = self._build_model()
        result = mdl_infer(
            self.model_, series,
            self._calibration_config("fit_pair"),
            EncodingConfig(delta=self.delta),
            jobs=self.jobs,
        )
        self.result_ = result
        self.alpha_star_ = result.alpha_star
        self.total_infections_ = result.d_star.daily
        self.theta_star_ = result.theta_star
        self.theta_hat_ = result.theta_hat
        self.cost_table_ = result.cost_table
        self.n_observed_ = len(series)
        self.observed_ = series
        return self

    @property
    def best_theta_(self):
        self._check_fitted()
        return self.theta_star_

    def predict(self, horizon=0):
        """Simulated daily reported series for observed + `horizon` days."""
        if horizon == 0:
            self._check_fitted()
            return simulate_outputs(self.model_, self.theta_star_, self.n_observed_).daily_reported
        return self._forecast(self.theta_star_, horizon)

    def refit_candidate(self, total):
        """Calibrate against an externally supplied total series."""
        self._check_fitted()
        return candidate_calibrate(
            self.model_, total, self.observed_,
            self._calibration_config("fit_pair"),
        )
