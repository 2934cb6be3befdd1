"""Model calibration by multi-start Nelder-Mead least squares.

Two objectives exist: fit the simulated reported series to the observed
counts alone, or fit the (reported, total) pair against an observed series
plus a candidate total-infection series. The optimizer works in the unit
cube; each coordinate maps affinely onto the parameter's bounds, which
keeps every evaluated point feasible and makes the documented "10% of the
bound range" initial simplex a constant 0.1 edge.

Restart start points are drawn from one seeded stream, so the best loss
over the first k restarts is reproduced exactly when more restarts are
requested. Ties between restarts break toward the lowest restart index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import CalibrationFailed, InvalidLatentSeries, MdlEpiError
from .models import EpiModel, Parametrization, simulate_outputs

_PENALTY = 1e30
_SIMPLEX_EDGE = 0.1
_UNIT_XATOL = 1e-6

FIT_REPORTED = "fit_reported"
FIT_PAIR = "fit_pair"


@dataclass(frozen=True)
class CalibrationConfig:
    objective: str = FIT_REPORTED
    max_iters: int = 300
    restarts: int = 4
    rng_seed: int = 0
    convergence_tol: float = 1e-8
    loss_weights: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if self.objective not in (FIT_REPORTED, FIT_PAIR):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if any(w <= 0 for w in self.loss_weights):
            raise ValueError("loss weights must be positive")


@dataclass(frozen=True)
class CalibrationResult:
    theta: Parametrization
    loss: float
    iterations_used: int
    converged: bool


@dataclass(frozen=True)
class _Layout:
    """Flat optimizer coordinates for a model's calibrated parameters."""

    entries: tuple[tuple[str, int | None], ...]  # (name, sub-period index)
    lows: np.ndarray
    spans: np.ndarray
    n_subperiods: int
    boundaries: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.entries)

    def to_theta(self, model: EpiModel, u: np.ndarray) -> Parametrization:
        u = np.clip(u, 0.0, 1.0)
        values = self.lows + u * self.spans
        calibrated: dict[str, float] = {}
        subperiod: dict[str, list[float]] = {}
        for (name, period), value in zip(self.entries, values):
            if period is None:
                calibrated[name] = float(value)
            else:
                subperiod.setdefault(name, []).append(float(value))
        for name, vals in subperiod.items():
            calibrated[name] = vals[0]
        return model.make_parametrization(
            calibrated,
            {name: tuple(vals) for name, vals in subperiod.items()} or None,
        )

    def to_unit(self, theta: Parametrization) -> np.ndarray:
        out = np.empty(self.dim)
        for i, (name, period) in enumerate(self.entries):
            if period is None:
                value = theta.calibrated[name]
            else:
                values = theta.subperiod_values.get(name)
                value = values[period] if values else theta.calibrated[name]
            span = self.spans[i]
            out[i] = 0.0 if span == 0 else (value - self.lows[i]) / span
        return np.clip(out, 0.0, 1.0)


def layout_for(model: EpiModel) -> _Layout:
    entries: list[tuple[str, int | None]] = []
    lows, highs = [], []
    for name in model.calibrated_names:
        periods = (
            range(model.n_subperiods)
            if name in model.reporting_params and model.n_subperiods > 1
            else (None,)
        )
        for period in periods:
            entries.append((name, period))
            lo, hi = model.bounds[name]
            lows.append(lo)
            highs.append(hi)
    lows = np.asarray(lows)
    return _Layout(
        entries=tuple(entries),
        lows=lows,
        spans=np.asarray(highs) - lows,
        n_subperiods=model.n_subperiods,
        boundaries=model.subperiod_days,
    )


def _initial_simplex(x0: np.ndarray) -> np.ndarray:
    d = len(x0)
    simplex = np.tile(x0, (d + 1, 1))
    for i in range(d):
        step = _SIMPLEX_EDGE if x0[i] + _SIMPLEX_EDGE <= 1.0 else -_SIMPLEX_EDGE
        simplex[i + 1, i] = x0[i] + step
    return simplex


def _run_restarts(model, cfg: CalibrationConfig, loss_fn, warm_start=None):
    layout = layout_for(model)
    rng = np.random.default_rng(cfg.rng_seed)
    starts = rng.uniform(0.0, 1.0, size=(cfg.restarts, layout.dim))
    if warm_start is not None:
        starts[0] = layout.to_unit(warm_start)

    def f(u):
        try:
            return loss_fn(layout.to_theta(model, u))
        except (MdlEpiError, FloatingPointError, OverflowError):
            # blown-up or negative dynamics in a bad corner of the cube
            return _PENALTY

    best = None
    total_iters = 0
    for k in range(cfg.restarts):
        x0 = starts[k]
        if cfg.max_iters == 0:
            fx = f(x0)
            cand = (fx, k, x0, 0, False)
        else:
            f0 = f(x0)
            res = minimize(
                f,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": _initial_simplex(x0),
                    "maxiter": cfg.max_iters,
                    "maxfev": 10**9,
                    "xatol": _UNIT_XATOL,
                    "fatol": cfg.convergence_tol * max(1.0, abs(f0)),
                },
            )
            total_iters += int(res.nit)
            cand = (float(res.fun), k, np.asarray(res.x), int(res.nit), bool(res.success))
        if best is None or cand[0] < best[0]:
            best = cand

    loss, _, x, _, converged = best
    if not np.isfinite(loss) or loss >= _PENALTY:
        raise CalibrationFailed("all restarts diverged")
    theta = layout.to_theta(model, x)
    return CalibrationResult(
        theta=theta, loss=loss, iterations_used=total_iters, converged=converged
    )


def _reported_loss(model, observed_daily, horizon):
    def loss(theta):
        out = simulate_outputs(model, theta, horizon)
        resid = out.daily_reported - observed_daily
        return float(resid @ resid)

    return loss


def _pair_loss(model, total_daily, observed_daily, horizon, weights):
    w_rep, w_tot = weights

    def loss(theta):
        out = simulate_outputs(model, theta, horizon)
        r = out.daily_reported - observed_daily
        t = out.daily_total - total_daily
        return float(w_rep * (r @ r) + w_tot * (t @ t))

    return loss


def base_infer(model: EpiModel, observed, cfg: CalibrationConfig) -> CalibrationResult:
    """Fit the calibrated parameters to the observed reported series only."""
    daily = np.asarray(observed.daily, dtype=float)
    if len(daily) < 14:
        raise ValueError("need at least 14 observed days to calibrate")
    return _run_restarts(model, cfg, _reported_loss(model, daily, len(daily)))


def candidate_calibrate(model: EpiModel, total, observed, cfg: CalibrationConfig,
                        warm_start: Parametrization | None = None) -> CalibrationResult:
    """Fit to the (candidate total, observed reported) pair jointly."""
    total_daily = np.asarray(getattr(total, "daily", total), dtype=float)
    observed_daily = np.asarray(observed.daily, dtype=float)
    if len(total_daily) != len(observed_daily):
        raise ValueError("total and observed series must have equal length")
    if np.any(total_daily < observed_daily):
        bad = int(np.argmax(total_daily < observed_daily))
        raise InvalidLatentSeries(
            f"candidate total {total_daily[bad]:.6g} < observed "
            f"{observed_daily[bad]:.6g} at day {bad}"
        )
    loss = _pair_loss(model, total_daily, observed_daily, len(observed_daily), cfg.loss_weights)
    return _run_restarts(model, cfg, loss, warm_start=warm_start)
