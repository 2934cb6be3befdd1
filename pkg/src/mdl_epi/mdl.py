"""Two-part description-length cost and the two-step latent-series search.

The total cost of a candidate total-infection series D under a baseline
parametrization (theta_hat, fit to reported counts alone) and a candidate
parametrization (theta_prime, fit to the pair) has four parts:

1. bits for theta_hat's calibrated values
2. bits for the componentwise difference theta_prime - theta_hat
3. bits for (reported_rate' * D) minus the baseline simulated reported
4. bits for (D - observed) / (1 - reported_rate') minus the candidate
   simulated total

Search runs in two steps: a linear scan over reported rates 0.01..1.00 in
steps of 0.01 with D fixed to observed/rate, then a Nelder-Mead refinement
of the full daily sequence constrained to keep its sum at
sum(observed)/best_rate and to stay at or above the observed counts.
"""
from __future__ import annotations

import datetime as dt
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .calibration import CalibrationConfig, base_infer, candidate_calibrate
from .encoding import EncodingConfig, cost_seq_diff, cost_vector
from .errors import (
    DegenerateReportedRate,
    MdlEpiError,
    RefinementFailed,
    SearchFailed,
    ShapeError,
)
from .models import EpiModel, Parametrization, reported_rate_of, simulate_outputs
from .timeseries import ReportedSeries

_N_CELLS = 100
_PROJECTION_LIMIT = 200


@dataclass(frozen=True)
class LatentTotalSeries:
    """Candidate daily total infections, aligned with an observed series."""

    daily: np.ndarray
    start_date: dt.date | None = None

    def __post_init__(self):
        arr = np.asarray(self.daily, dtype=float).copy()
        if np.any(arr < 0):
            raise ValueError("total infections must be nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "daily", arr)

    def __len__(self) -> int:
        return len(self.daily)


@dataclass(frozen=True)
class CostBreakdown:
    """The four cost components, in bits."""

    cost_theta_hat: float
    cost_theta_prime_given_hat: float
    cost_D_given_params: float
    data_cost: float

    @property
    def total(self) -> float:
        return (self.cost_theta_hat + self.cost_theta_prime_given_hat
                + self.cost_D_given_params + self.data_cost)

    @classmethod
    def failed(cls) -> "CostBreakdown":
        return cls(np.inf, np.inf, np.inf, np.inf)


@dataclass(frozen=True)
class GridCell:
    alpha: float
    cost: CostBreakdown
    theta_prime: Parametrization | None
    failure: str | None = None


@dataclass(frozen=True)
class MdlResult:
    alpha_star: float
    d_star: LatentTotalSeries
    theta_star: Parametrization
    theta_hat: Parametrization
    cost_table: tuple[GridCell, ...]


def total_cost(observed, d, theta_prime: Parametrization, theta_hat: Parametrization,
               model: EpiModel, cfg: EncodingConfig,
               outputs_prime=None, reported_hat=None) -> CostBreakdown:
    """Evaluate the four-part cost of (D, theta_prime, theta_hat).

    outputs_prime / reported_hat are optional caches of the candidate
    simulation and the baseline simulated reported series.
    """
    observed_daily = np.asarray(getattr(observed, "daily", observed), dtype=float)
    d_daily = np.asarray(getattr(d, "daily", d), dtype=float)
    horizon = len(observed_daily)
    if len(d_daily) != horizon:
        raise ShapeError(f"candidate length {len(d_daily)} != observed {horizon}")

    if outputs_prime is None:
        outputs_prime = simulate_outputs(model, theta_prime, horizon)
    if reported_hat is None:
        reported_hat = simulate_outputs(model, theta_hat, horizon).daily_reported
    if len(reported_hat) != horizon or len(outputs_prime.daily_total) != horizon:
        raise ShapeError("simulated series do not match the observed horizon")

    alpha_prime = reported_rate_of(outputs_prime)
    if alpha_prime >= 1.0:
        raise DegenerateReportedRate(
            f"candidate reported rate {alpha_prime} leaves no unreported share"
        )

    shared = sorted(set(theta_hat.calibrated) & set(theta_prime.calibrated))
    hat_flat = theta_hat.flat_values()
    diff = _shared_difference(theta_prime, theta_hat, shared)

    part1 = cost_vector(hat_flat, cfg)
    part2 = cost_vector(diff, cfg)
    part3 = cost_seq_diff(alpha_prime * d_daily, reported_hat, cfg)
    part4 = cost_seq_diff(
        (d_daily - observed_daily) / (1.0 - alpha_prime),
        outputs_prime.daily_total,
        cfg,
    )
    return CostBreakdown(part1, part2, part3, part4)


def _shared_difference(theta_prime, theta_hat, shared_names):
    diffs = []
    for name in shared_names:
        prime_vals = theta_prime.subperiod_values.get(name)
        hat_vals = theta_hat.subperiod_values.get(name)
        if prime_vals or hat_vals:
            n = max(len(prime_vals or ()), len(hat_vals or ()))
            p = prime_vals or (theta_prime.calibrated[name],) * n
            h = hat_vals or (theta_hat.calibrated[name],) * n
            diffs.extend(pv - hv for pv, hv in zip(p, h))
        else:
            diffs.append(theta_prime.calibrated[name] - theta_hat.calibrated[name])
    return np.asarray(diffs, dtype=float)


def grid_alphas() -> np.ndarray:
    return np.arange(1, _N_CELLS + 1) / 100.0


def _evaluate_cell(args):
    model, observed, theta_hat, calib_cfg, enc_cfg, reported_hat, idx, alpha = args
    cell_cfg = replace(calib_cfg, rng_seed=calib_cfg.rng_seed ^ idx)
    observed_daily = np.asarray(observed.daily, dtype=float)
    d = observed_daily / alpha
    try:
        fit = candidate_calibrate(model, d, observed, cell_cfg)
        outputs_prime = simulate_outputs(model, fit.theta, len(observed_daily))
        cost = total_cost(
            observed, d, fit.theta, theta_hat, model, enc_cfg,
            outputs_prime=outputs_prime, reported_hat=reported_hat,
        )
        return GridCell(alpha=alpha, cost=cost, theta_prime=fit.theta)
    except MdlEpiError as exc:
        return GridCell(
            alpha=alpha, cost=CostBreakdown.failed(), theta_prime=None,
            failure=f"{type(exc).__name__}: {exc}",
        )


def pick_alpha_star(cost_table) -> GridCell:
    """Lowest-total cell; ties break toward the smallest reported rate."""
    best = None
    for cell in sorted(cost_table, key=lambda c: c.alpha):
        if not np.isfinite(cell.cost.total):
            continue
        if best is None or cell.cost.total < best.cost.total:
            best = cell
    if best is None:
        raise SearchFailed("every grid cell failed calibration")
    return best


def grid_search_alpha(model: EpiModel, observed, theta_hat: Parametrization,
                      calib_cfg: CalibrationConfig, enc_cfg: EncodingConfig,
                      jobs: int = 1) -> tuple[float, tuple[GridCell, ...]]:
    """Scan reported rates 0.01..1.00 with D = observed / rate per cell.

    Cells are independent; each is seeded with rng_seed XOR its index, so
    the table (and the argmin) is identical for any job count.
    """
    observed_daily = np.asarray(observed.daily, dtype=float)
    if observed_daily.sum() <= 0:
        raise SearchFailed("observed series is all zeros")

    reported_hat = simulate_outputs(model, theta_hat, len(observed_daily)).daily_reported
    tasks = [
        (model, observed, theta_hat, calib_cfg, enc_cfg, reported_hat, idx, float(alpha))
        for idx, alpha in enumerate(grid_alphas())
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            table = tuple(pool.map(_evaluate_cell, tasks, chunksize=4))
    else:
        table = tuple(_evaluate_cell(t) for t in tasks)
    best = pick_alpha_star(table)
    return best.alpha, table


def project_feasible(x: np.ndarray, observed_daily: np.ndarray, target_sum: float,
                     limit: int = _PROJECTION_LIMIT) -> np.ndarray:
    """Nearest practical point with x >= observed and sum(x) = target_sum.

    Alternates elementwise clamping with rescaling to the target sum; the
    clamp-then-rescale pair contracts whenever target_sum exceeds the
    observed sum, which step 1 guarantees (rates are below 1).
    """
    y = np.maximum(x, observed_daily)
    scale = max(target_sum, 1.0)
    for _ in range(limit):
        s = y.sum()
        if s <= 0:
            y = observed_daily * (target_sum / max(observed_daily.sum(), 1e-300))
            continue
        y = y * (target_sum / s)
        worst = np.min(y - observed_daily)
        if worst >= -1e-9 * scale:
            y = np.maximum(y, observed_daily)
            return y
        y = np.maximum(y, observed_daily)
    raise RefinementFailed("feasibility projection did not converge")


def refine_total_series(alpha_star: float, observed, model: EpiModel,
                        theta_hat: Parametrization, calib_cfg: CalibrationConfig,
                        enc_cfg: EncodingConfig,
                        warm_theta: Parametrization | None = None,
                        recalib_max_iters: int | None = None) -> LatentTotalSeries:
    """Nelder-Mead over the daily sequence at the selected reported rate.

    Every candidate is projected to the feasible set before evaluation, the
    candidate parametrization is re-fit (warm-started from the matching
    grid cell) per evaluation, and the best feasible point seen wins, so
    the result never costs more than its observed/alpha_star start.
    """
    if not (0.0 < alpha_star < 1.0):
        raise ValueError("alpha_star must lie strictly inside (0, 1)")
    observed_daily = np.asarray(observed.daily, dtype=float)
    target_sum = observed_daily.sum() / alpha_star
    x0 = observed_daily / alpha_star

    if recalib_max_iters is None:
        recalib_max_iters = max(20, calib_cfg.max_iters // 5)
    inner_cfg = replace(calib_cfg, restarts=1, max_iters=recalib_max_iters)

    best: dict = {"cost": np.inf, "d": None}

    def objective(x):
        try:
            d = project_feasible(x, observed_daily, target_sum)
            fit = candidate_calibrate(model, d, observed, inner_cfg, warm_start=warm_theta)
            outputs_prime = simulate_outputs(model, fit.theta, len(observed_daily))
            cost = total_cost(
                observed, d, fit.theta, theta_hat, model, enc_cfg,
                outputs_prime=outputs_prime,
            ).total
        except MdlEpiError:
            return np.inf
        if cost < best["cost"]:
            best["cost"] = cost
            best["d"] = d
        return cost

    dim = len(x0)
    minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": calib_cfg.max_iters,
            "maxfev": dim + 1 + 3 * calib_cfg.max_iters,
            "adaptive": True,
            "xatol": 1e-8 * max(1.0, float(np.max(x0))),
            "fatol": 1e-10,
        },
    )
    if best["d"] is None:
        raise RefinementFailed("no feasible candidate produced a finite cost")
    return LatentTotalSeries(
        daily=best["d"], start_date=getattr(observed, "start_date", None)
    )


def mdl_infer(model: EpiModel, observed: ReportedSeries,
              calib_cfg: CalibrationConfig, enc_cfg: EncodingConfig,
              jobs: int = 1, theta_hat: Parametrization | None = None) -> MdlResult:
    """Full pipeline: baseline fit, rate grid, series refinement, final fit.

    A precomputed theta_hat skips the baseline calibration. Deterministic
    for fixed seeds and any job count.
    """
    observed_daily = np.asarray(observed.daily, dtype=float)
    if observed_daily.sum() <= 0:
        raise SearchFailed("observed series is all zeros")

    if theta_hat is None:
        theta_hat = base_infer(model, observed, calib_cfg).theta
    alpha_star, table = grid_search_alpha(model, observed, theta_hat, calib_cfg, enc_cfg, jobs=jobs)
    warm = next(c.theta_prime for c in table if c.alpha == alpha_star)
    if alpha_star >= 1.0:
        # at rate 1 the sum constraint plus D >= observed pins D exactly
        d_star = LatentTotalSeries(daily=observed_daily, start_date=observed.start_date)
    else:
        d_star = refine_total_series(
            alpha_star, observed, model, theta_hat, calib_cfg, enc_cfg, warm_theta=warm
        )
    final = candidate_calibrate(model, d_star.daily, observed, calib_cfg, warm_start=warm)
    return MdlResult(
        alpha_star=alpha_star,
        d_star=d_star,
        theta_star=final.theta,
        theta_hat=theta_hat,
        cost_table=table,
    )


def cost_table_rows(table) -> list[dict]:
    """Rows for the cost-table CSV export."""
    rows = []
    for cell in table:
        rows.append(
            {
                "alpha": cell.alpha,
                "cost_theta_hat": cell.cost.cost_theta_hat,
                "cost_theta_prime": cell.cost.cost_theta_prime_given_hat,
                "cost_D": cell.cost.cost_D_given_params,
                "data_cost": cell.cost.data_cost,
                "total": cell.cost.total,
            }
        )
    return rows
