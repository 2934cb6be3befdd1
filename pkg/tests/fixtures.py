"""Shared synthetic fixtures.

Generate-then-recover tests simulate a known parametrization, treat its
reported output as the observation, and check that inference finds its way
back. Fixture constants are frozen here so expensive tests stay stable.
"""
from __future__ import annotations

import datetime as dt

import numpy as np

from mdl_epi import ReportedSeries, build_model, simulate_outputs

START = dt.date(2020, 3, 1)

SAPHIRE_TRUE = {"beta": 0.7, "r": 0.25}
SEIR_HD_TRUE = {"beta0": 0.6, "sigma": 0.3, "e0": 50.0, "alpha": 0.375, "alpha1": 0.4}

# isolation-scenario fixture: slow epidemic peaking ~15 days after the
# split, small reported fraction (overall reported rate 0.05)
NPI_TRUE = {"beta0": 0.2, "sigma": 0.0, "e0": 100.0, "alpha": 0.5, "alpha1": 0.1}
NPI_SPLIT = 140
NPI_HORIZON = 200


def npi_fixture():
    model = build_model("seir_hd", intervention_day=None)
    theta = model.make_parametrization(dict(NPI_TRUE))
    return model, theta


def saphire_fixture(horizon=60, noise=0.0, seed=123, true=None):
    """(model, theta_true, true outputs, observed series)."""
    model = build_model("saphire")
    theta = model.make_parametrization(dict(true or SAPHIRE_TRUE))
    out = simulate_outputs(model, theta, horizon)
    observed = _observe(out.daily_reported, noise, seed)
    return model, theta, out, observed


def seir_hd_fixture(horizon=120, noise=0.0, seed=123, true=None, intervention_day=60):
    model = build_model("seir_hd", intervention_day=intervention_day)
    theta = model.make_parametrization(dict(true or SEIR_HD_TRUE))
    out = simulate_outputs(model, theta, horizon)
    observed = _observe(out.daily_reported, noise, seed)
    return model, theta, out, observed


def _observe(daily_reported, noise, seed):
    values = np.asarray(daily_reported, dtype=float)
    if noise > 0.0:
        rng = np.random.default_rng(seed)
        values = np.maximum(values * (1.0 + noise * rng.standard_normal(len(values))), 0.0)
    return ReportedSeries(start_date=START, daily=values)
