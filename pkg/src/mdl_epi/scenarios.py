"""Counterfactual isolation scenarios on a learned parametrization.

Isolating a subpopulation multiplies its force-of-infection contribution
by the scenario's infectiousness multiplier from the start day onward; it
is a rate reduction, not a compartment transfer. The canonical suite is:

  baseline      no change
  (i)           the reported fraction of severe and mild symptomatic
  (ii)          all severe and mild symptomatic
  (iii)-(v)     (ii) plus 25% / 50% / 75% of presymptomatic + asymptomatic

These are defined for the 10-compartment family only; the 7-compartment
family has no symptomatic split to isolate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedModel
from .models import SEIR_HD, EpiModel, Parametrization, simulate_outputs

CANONICAL_FRACTIONS = (0.25, 0.50, 0.75)


@dataclass(frozen=True)
class ScenarioSpec:
    """Which subpopulations are isolated, how strongly, and from when."""

    isolate_reported: bool = False
    isolate_symptomatic: bool = False
    presym_asym_fraction: float = 0.0
    infectiousness_multiplier: float = 1.0
    start_day: int = 0

    def __post_init__(self):
        if not (0.0 < self.infectiousness_multiplier <= 1.0):
            raise ValueError("infectiousness_multiplier must lie in (0, 1]")
        if not (0.0 <= self.presym_asym_fraction <= 1.0):
            raise ValueError("presym_asym_fraction must lie in [0, 1]")
        if self.presym_asym_fraction > 0 and not self.isolate_symptomatic:
            raise ValueError(
                "presym/asym isolation builds on symptomatic isolation; "
                "set isolate_symptomatic=True"
            )


@dataclass(frozen=True)
class ScenarioResult:
    spec: ScenarioSpec
    daily_reported: np.ndarray
    label: str


def _weights(spec: ScenarioSpec, theta: Parametrization) -> tuple[float, float, float, float]:
    m = spec.infectiousness_multiplier
    w_presym = w_severe = w_mild = w_asym = 1.0
    if spec.isolate_symptomatic:
        w_severe = w_mild = m
    elif spec.isolate_reported:
        # only the reported share of symptomatic cases is isolated
        values = theta.subperiod_values.get("alpha1")
        alpha1 = values[-1] if values else theta.calibrated["alpha1"]
        w_severe = w_mild = 1.0 - alpha1 * (1.0 - m)
    if spec.presym_asym_fraction > 0:
        w_presym = w_asym = 1.0 - spec.presym_asym_fraction * (1.0 - m)
    return w_presym, w_severe, w_mild, w_asym


def apply_npi(model: EpiModel, theta: Parametrization, spec: ScenarioSpec,
              horizon: int, label: str = "") -> ScenarioResult:
    """Simulate the scenario and return its daily reported series."""
    if model.name != SEIR_HD:
        raise UnsupportedModel(
            f"isolation scenarios are defined for {SEIR_HD}, not {model.name}"
        )
    npi = (spec.start_day, *_weights(spec, theta))
    outputs = simulate_outputs(model, theta, horizon, npi=npi)
    return ScenarioResult(spec=spec, daily_reported=outputs.daily_reported,
                          label=label or _default_label(spec))


def _default_label(spec: ScenarioSpec) -> str:
    if spec.presym_asym_fraction > 0:
        return f"isolate-symptomatic-presym-asym-{int(round(spec.presym_asym_fraction * 100))}"
    if spec.isolate_symptomatic:
        return "isolate-symptomatic"
    if spec.isolate_reported:
        return "isolate-reported"
    return "no-npi"


def run_scenario_suite(model: EpiModel, theta: Parametrization, horizon: int,
                       multiplier: float = 0.5, start_day: int = 0) -> list[ScenarioResult]:
    """Baseline plus the five canonical scenarios at one multiplier."""
    specs = [
        ScenarioSpec(start_day=start_day, infectiousness_multiplier=1.0),
        ScenarioSpec(isolate_reported=True, infectiousness_multiplier=multiplier,
                     start_day=start_day),
        ScenarioSpec(isolate_symptomatic=True, infectiousness_multiplier=multiplier,
                     start_day=start_day),
    ]
    specs.extend(
        ScenarioSpec(isolate_symptomatic=True, presym_asym_fraction=q,
                     infectiousness_multiplier=multiplier, start_day=start_day)
        for q in CANONICAL_FRACTIONS
    )
    labels = ["no-npi", "isolate-reported", "isolate-symptomatic"] + [
        f"isolate-symptomatic-presym-asym-{int(q * 100)}" for q in CANONICAL_FRACTIONS
    ]
    return [apply_npi(model, theta, s, horizon, label=l) for s, l in zip(specs, labels)]
