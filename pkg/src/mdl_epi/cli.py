"""Command-line entry point.

    mdl-epi calibrate --config run.ini
    mdl-epi infer     --config run.ini [--jobs N] [--alpha-only]
    mdl-epi forecast  --config run.ini
    mdl-epi scenario  --config run.ini [--multiplier 0.5]
    mdl-epi report    --config run.ini
    mdl-epi fetch URL OUT [--sha256 HEX]

Flags override the config file; MDL_EPI_OUTDIR overrides the output
directory. Every command except fetch is deterministic for a fixed config
and seed. Exit codes: 0 success, 2 calibration failure, 3 missing or bad
input file, 4 network failure, 5 integrity mismatch, 1 anything else.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import os
import sys
import urllib.error
import urllib.request
from dataclasses import replace

from .calibration import CalibrationConfig, base_infer
from .config import RunConfig, load_model_params, load_run_config
from .encoding import EncodingConfig
from .errors import (
    CalibrationFailed,
    ConfigError,
    MdlEpiError,
    NotFound,
    UnsupportedModel,
)
from .mdl import cost_table_rows, grid_search_alpha, mdl_infer
from .metrics import (
    build_report,
    compare_serology,
    pearson,
    rho,
    rmse,
    write_tidy_csv,
)
from .models import (
    SEIR_HD,
    Parametrization,
    build_model,
    simulate_outputs,
    symptomatic_rate,
)
from .timeseries import (
    PeriodSplit,
    default_subperiods,
    load_cumulative_csv,
    load_serology_csv,
    load_survey_csv,
    smooth_14,
    split_observed_forecast,
    to_daily,
)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CALIBRATION = 2
EXIT_IO = 3
EXIT_NETWORK = 4
EXIT_INTEGRITY = 5


def _outdir(cfg: RunConfig) -> str:
    out = os.environ.get("MDL_EPI_OUTDIR") or cfg.outdir
    os.makedirs(out, exist_ok=True)
    return out


def _load_observed(cfg: RunConfig):
    cumulative = load_cumulative_csv(cfg.cases_csv, cfg.region)
    daily = to_daily(cumulative)
    if cfg.smooth:
        daily = smooth_14(daily)
    if cfg.use_default_subperiods:
        split = default_subperiods(daily.start_date, cfg.observed_end)
    else:
        split = PeriodSplit(cfg.observed_end, cfg.subperiod_boundaries)
    observed, forecast = split_observed_forecast(daily, split)
    return daily, observed, forecast, split


def _build_model(cfg: RunConfig, observed, split: PeriodSplit):
    params = load_model_params(cfg.model_params_path)
    intervention_day = None
    if cfg.model == SEIR_HD:
        if cfg.intervention_date is not None:
            intervention_day = float((cfg.intervention_date - observed.start_date).days)
        else:
            intervention_day = params.intervention_day
    subperiod_days = tuple(
        (b - observed.start_date).days for b in split.subperiod_boundaries
    )
    return build_model(
        cfg.model, params=params,
        intervention_day=intervention_day,
        subperiod_days=subperiod_days,
    )


def _calib_config(cfg: RunConfig, objective: str) -> CalibrationConfig:
    return CalibrationConfig(
        objective=objective,
        max_iters=cfg.max_iters,
        restarts=cfg.restarts,
        rng_seed=cfg.seed,
        convergence_tol=cfg.convergence_tol,
        loss_weights=(cfg.w_reported, cfg.w_total),
    )


def _theta_payload(theta: Parametrization) -> dict:
    return {
        "calibrated": {k: theta.calibrated[k] for k in sorted(theta.calibrated)},
        "fixed": {k: theta.fixed[k] for k in sorted(theta.fixed)},
        "bounds": {k: list(theta.bounds[k]) for k in sorted(theta.bounds)},
        "subperiod_boundaries": list(theta.subperiod_boundaries),
        "subperiod_values": {
            k: list(v) for k, v in sorted(theta.subperiod_values.items())
        },
    }


def _theta_from_payload(raw: dict) -> Parametrization:
    return Parametrization(
        calibrated=dict(raw["calibrated"]),
        fixed=dict(raw["fixed"]),
        bounds={k: tuple(v) for k, v in raw["bounds"].items()},
        subperiod_boundaries=tuple(raw["subperiod_boundaries"]),
        subperiod_values={k: tuple(v) for k, v in raw["subperiod_values"].items()},
    )


def _write_json(path: str, payload: dict):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def _load_theta(path: str) -> Parametrization:
    try:
        with open(path, encoding="utf-8") as handle:
            return _theta_from_payload(json.load(handle)["theta"])
    except OSError as exc:
        raise NotFound(f"cannot read parametrization from {path}: {exc}") from exc


def cmd_calibrate(cfg: RunConfig) -> int:
    _, observed, _, split = _load_observed(cfg)
    model = _build_model(cfg, observed, split)
    result = base_infer(model, observed, _calib_config(cfg, "fit_reported"))
    out = _outdir(cfg)
    _write_json(
        os.path.join(out, "theta_hat.json"),
        {
            "theta": _theta_payload(result.theta),
            "diagnostics": {
                "loss": result.loss,
                "iterations_used": result.iterations_used,
                "converged": result.converged,
                "seed": cfg.seed,
            },
        },
    )
    print(f"wrote {os.path.join(out, 'theta_hat.json')} (loss={result.loss:.6g})")
    return EXIT_OK


def _write_cost_table(path: str, table):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["alpha", "cost_theta_hat", "cost_theta_prime",
                         "cost_D", "data_cost", "total"])
        for row in cost_table_rows(table):
            writer.writerow([
                f"{row['alpha']:.2f}",
                repr(row["cost_theta_hat"]),
                repr(row["cost_theta_prime"]),
                repr(row["cost_D"]),
                repr(row["data_cost"]),
                repr(row["total"]),
            ])


def cmd_infer(cfg: RunConfig, alpha_only: bool = False, theta_hat_path: str | None = None) -> int:
    _, observed, _, split = _load_observed(cfg)
    model = _build_model(cfg, observed, split)
    calib = _calib_config(cfg, "fit_pair")
    enc = EncodingConfig(delta=cfg.delta)
    out = _outdir(cfg)

    if theta_hat_path:
        theta_hat = _load_theta(theta_hat_path)
    else:
        theta_hat = base_infer(model, observed, replace(calib, objective="fit_reported")).theta
        _write_json(os.path.join(out, "theta_hat.json"), {"theta": _theta_payload(theta_hat)})

    if alpha_only:
        alpha_star, table = grid_search_alpha(model, observed, theta_hat, calib, enc, jobs=cfg.jobs)
        _write_cost_table(os.path.join(out, "cost_table.csv"), table)
        _write_json(os.path.join(out, "result.json"), {"alpha_star": alpha_star, "alpha_only": True})
        print(f"alpha_star={alpha_star:.2f} (grid only)")
        return EXIT_OK

    result = mdl_infer(model, observed, calib, enc, jobs=cfg.jobs, theta_hat=theta_hat)
    _write_cost_table(os.path.join(out, "cost_table.csv"), result.cost_table)
    _write_json(os.path.join(out, "result.json"), {"alpha_star": result.alpha_star})
    _write_json(os.path.join(out, "theta_star.json"), {"theta": _theta_payload(result.theta_star)})
    with open(os.path.join(out, "d_star.csv"), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "total_infections"])
        for i, value in enumerate(result.d_star.daily):
            day = observed.start_date + dt.timedelta(days=i)
            writer.writerow([day.isoformat(), repr(float(value))])
    print(f"alpha_star={result.alpha_star:.2f}; wrote d_star.csv, theta_star.json, cost_table.csv")
    return EXIT_OK


def cmd_forecast(cfg: RunConfig) -> int:
    daily, observed, forecast, split = _load_observed(cfg)
    model = _build_model(cfg, observed, split)
    out = _outdir(cfg)
    theta_hat = _load_theta(os.path.join(out, "theta_hat.json"))
    theta_star = _load_theta(os.path.join(out, "theta_star.json"))
    horizon = len(daily)
    base = simulate_outputs(model, theta_hat, horizon).daily_reported
    mdl = simulate_outputs(model, theta_star, horizon).daily_reported
    write_tidy_csv(
        os.path.join(out, "forecast.csv"),
        {"observed": daily.daily, "base_reported": base, "mdl_reported": mdl},
        daily.start_date,
    )
    print(f"wrote {os.path.join(out, 'forecast.csv')} ({horizon} days)")
    return EXIT_OK


def cmd_scenario(cfg: RunConfig, multiplier: float | None = None, use: str = "auto") -> int:
    from .scenarios import run_scenario_suite

    daily, observed, forecast, split = _load_observed(cfg)
    if cfg.model != SEIR_HD:
        raise UnsupportedModel("isolation scenarios need the seir_hd model family")
    model = _build_model(cfg, observed, split)
    out = _outdir(cfg)

    star_path = os.path.join(out, "theta_star.json")
    if use == "mdl" or (use == "auto" and os.path.exists(star_path)):
        theta = _load_theta(star_path)
    else:
        theta = _load_theta(os.path.join(out, "theta_hat.json"))

    m = cfg.scenario_multiplier if multiplier is None else multiplier
    if cfg.scenario_start is not None:
        start_day = (cfg.scenario_start - observed.start_date).days
    else:
        start_day = len(observed)
    results = run_scenario_suite(model, theta, len(daily), multiplier=m, start_day=start_day)

    path = os.path.join(out, "scenario_suite.csv")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["scenario", "date", "daily_reported"])
        for res in results:
            for i, value in enumerate(res.daily_reported):
                day = observed.start_date + dt.timedelta(days=i)
                writer.writerow([res.label, day.isoformat(), repr(float(value))])
    print(f"wrote {path} ({len(results)} scenarios, multiplier={m})")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    daily, observed, forecast, split = _load_observed(cfg)
    model = _build_model(cfg, observed, split)
    out = _outdir(cfg)
    theta_hat = _load_theta(os.path.join(out, "theta_hat.json"))
    theta_star = _load_theta(os.path.join(out, "theta_star.json"))

    horizon = len(daily)
    base_out = simulate_outputs(model, theta_hat, horizon)
    mdl_out = simulate_outputs(model, theta_star, horizon)
    n_obs = len(observed)

    rmse_base = rmse(base_out.daily_reported[:n_obs], observed.daily)
    rmse_mdl = rmse(mdl_out.daily_reported[:n_obs], observed.daily)
    rho_obs = rho(rmse_base, rmse_mdl)
    if forecast is not None and len(forecast) > 0:
        rho_fc = rho(
            rmse(base_out.daily_reported[n_obs:], forecast.daily),
            rmse(mdl_out.daily_reported[n_obs:], forecast.daily),
        )
    else:
        rho_fc = rho_obs

    serology_points = ()
    rho_tinf = None
    if cfg.serology_csv:
        sero = load_serology_csv(cfg.serology_csv)
        serology_points = compare_serology(base_out, mdl_out, sero, daily.start_date)
        if serology_points:
            truth = [p.sero_point for p in serology_points]
            rho_tinf = rho(
                rmse([p.model_cumulative_base for p in serology_points], truth),
                rmse([p.model_cumulative_mdl for p in serology_points], truth),
            )

    symptomatic_trend = None
    if cfg.survey_csv and cfg.model == SEIR_HD:
        survey = load_survey_csv(cfg.survey_csv)
        rate_base = symptomatic_rate(base_out)
        rate_mdl = symptomatic_rate(mdl_out)
        offset = (survey.start_date - daily.start_date).days
        idx = [offset + i for i in range(len(survey.rate))
               if 0 <= offset + i < horizon]
        if len(idx) >= 2:
            survey_vals = survey.rate[[i - offset for i in idx]]
            model_base = rate_base[idx]
            model_mdl = rate_mdl[idx]
            symptomatic_trend = {
                "dates": [(daily.start_date + dt.timedelta(days=i)).isoformat() for i in idx],
                "survey": [float(v) for v in survey_vals],
                "model_base": [float(v) for v in model_base],
                "model_mdl": [float(v) for v in model_mdl],
                "pearson_base": pearson(model_base, survey_vals),
                "pearson_mdl": pearson(model_mdl, survey_vals),
            }

    report = build_report(
        rmse_base_reported=rmse_base,
        rmse_mdl_reported=rmse_mdl,
        rho_rinf_observed=rho_obs,
        rho_rinf_forecast=rho_fc,
        rho_tinf=rho_tinf,
        serology_points=serology_points,
        symptomatic_trend=symptomatic_trend,
        config_echo=cfg.echo(),
    )
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as handle:
        handle.write(report.to_json())
        handle.write("\n")
    write_tidy_csv(
        os.path.join(out, "series.csv"),
        {
            "observed": daily.daily,
            "base_reported": base_out.daily_reported,
            "mdl_reported": mdl_out.daily_reported,
            "base_total": base_out.daily_total,
            "mdl_total": mdl_out.daily_total,
        },
        daily.start_date,
    )
    print(f"wrote report.json and series.csv (rho observed={rho_obs:.3g})")
    return EXIT_OK


def cmd_fetch(url: str, out_path: str, sha256: str | None = None) -> int:
    try:
        with urllib.request.urlopen(url) as response:
            payload = response.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        print(f"fetch failed for {url}: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    if sha256 is not None:
        digest = hashlib.sha256(payload).hexdigest()
        if digest != sha256.lower():
            print(f"checksum mismatch: expected {sha256}, got {digest}", file=sys.stderr)
            return EXIT_INTEGRITY
    os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
    with open(out_path, "wb") as handle:
        handle.write(payload)
    print(f"fetched {len(payload)} bytes -> {out_path}")
    return EXIT_OK


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        updates["jobs"] = args.jobs
    return replace(cfg, **updates) if updates else cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdl-epi", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        return p

    add_run_command("calibrate", "fit the baseline parametrization to reported counts")
    p_infer = add_run_command("infer", "run the full description-length inference")
    p_infer.add_argument("--alpha-only", action="store_true",
                         help="stop after the reported-rate grid search")
    p_infer.add_argument("--theta-hat", default=None,
                         help="reuse a saved baseline parametrization")
    add_run_command("forecast", "simulate observed+forecast reported series")
    p_scen = add_run_command("scenario", "run the isolation scenario suite")
    p_scen.add_argument("--multiplier", type=float, default=None)
    p_scen.add_argument("--use", choices=["auto", "mdl", "base"], default="auto")
    add_run_command("report", "write the evaluation report")

    p_fetch = sub.add_parser("fetch", help="download a CSV")
    p_fetch.add_argument("url")
    p_fetch.add_argument("out")
    p_fetch.add_argument("--sha256", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fetch":
            return cmd_fetch(args.url, args.out, sha256=args.sha256)
        cfg = _apply_overrides(load_run_config(args.config), args)
        if args.command == "calibrate":
            return cmd_calibrate(cfg)
        if args.command == "infer":
            return cmd_infer(cfg, alpha_only=args.alpha_only, theta_hat_path=args.theta_hat)
        if args.command == "forecast":
            return cmd_forecast(cfg)
        if args.command == "scenario":
            return cmd_scenario(cfg, multiplier=args.multiplier, use=args.use)
        if args.command == "report":
            return cmd_report(cfg)
        raise ValueError(f"unhandled command {args.command}")
    except CalibrationFailed as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (NotFound, ConfigError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (MdlEpiError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
