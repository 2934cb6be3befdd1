"""Compartmental model families and their observables.

Two families are defined:

* ``seir_hd`` -- 10 compartments S, E, IP, IS, IM, IA, HD, HR, R, D.
  Calibrated: beta0, sigma (transmission reduction after the intervention
  day), e0, alpha (asymptomatic fraction), alpha1 (fraction of new
  symptomatic infections that are reported). alpha1 never enters the ODE;
  it scales the observables only.
* ``saphire`` -- 7 compartments S, E, P, I, A, H, R. Calibrated: beta, r
  (reported rate splitting the presymptomatic outflow into ascertained I
  and unascertained A). I and A share infectiousness and exit rate, so the
  transmission dynamics do not depend on r; r only routes and scales.

Daily observables:

* reported[t]   = alpha1 * (IP->IS + IP->IM flows)      (seir_hd)
                = r * (P outflow)                        (saphire)
* unreported[t] = (1-alpha1) * (IP->IS + IP->IM) + E->IA (seir_hd)
                = (1-r) * (P outflow)                    (saphire)
* total[t]      = reported[t] + unreported[t]

Reporting parameters (alpha1 / r) may take one value per sub-period;
dynamics parameters are shared across sub-periods.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateEpidemic, UnsupportedObservable
from .ode_engine import DEFAULT_DT, FlowSpec, Trajectory, integrate

SEIR_HD = "seir_hd"
SAPHIRE = "saphire"

_SEIR_HD_COMPARTMENTS = ("S", "E", "IP", "IS", "IM", "IA", "HD", "HR", "R", "D")
_SAPHIRE_COMPARTMENTS = ("S", "E", "P", "I", "A", "H", "R")

_UNIT_INTERVAL_PARAMS = {"alpha", "alpha1", "r", "sigma"}


@dataclass(frozen=True)
class Parametrization:
    """A named parameter assignment for one model family.

    calibrated holds the scalar value of every calibrated parameter;
    subperiod_values optionally overrides a reporting parameter with one
    value per sub-period (boundaries are day offsets where periods 1..k
    begin). fixed and bounds come from the model schema.
    """

    calibrated: dict[str, float]
    fixed: dict[str, float]
    bounds: dict[str, tuple[float, float]]
    subperiod_boundaries: tuple[int, ...] = ()
    subperiod_values: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.calibrated.items():
            lo, hi = self.bounds[name]
            if not (lo <= value <= hi):
                raise ValueError(f"{name}={value} outside bounds [{lo}, {hi}]")
        for name, values in self.subperiod_values.items():
            lo, hi = self.bounds[name]
            if len(values) != len(self.subperiod_boundaries) + 1:
                raise ValueError(f"{name}: expected one value per sub-period")
            for value in values:
                if not (lo <= value <= hi):
                    raise ValueError(f"{name}={value} outside bounds [{lo}, {hi}]")
        for name in _UNIT_INTERVAL_PARAMS & set(self.calibrated):
            if not (0.0 <= self.calibrated[name] <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1]")

    def value_schedule(self, name: str, horizon: int) -> np.ndarray:
        """Per-day values of a parameter over the horizon."""
        out = np.full(horizon, self.calibrated[name])
        values = self.subperiod_values.get(name)
        if values:
            for start, value in zip((0,) + self.subperiod_boundaries, values):
                out[start:] = value
        return out

    def flat_names(self) -> tuple[str, ...]:
        """Calibrated parameter names with sub-period expansion."""
        names = []
        for name in sorted(self.calibrated):
            if name in self.subperiod_values:
                names.extend(f"{name}[{k}]" for k in range(len(self.subperiod_values[name])))
            else:
                names.append(name)
        return tuple(names)

    def flat_values(self) -> np.ndarray:
        """Calibrated parameter values aligned with flat_names()."""
        values = []
        for name in sorted(self.calibrated):
            if name in self.subperiod_values:
                values.extend(self.subperiod_values[name])
            else:
                values.append(self.calibrated[name])
        return np.asarray(values, dtype=float)


@dataclass(frozen=True)
class EpiModel:
    """Schema and fixed parameters of one model family."""

    name: str
    compartments: tuple[str, ...]
    calibrated_names: tuple[str, ...]
    reporting_params: tuple[str, ...]
    fixed: dict[str, float]
    bounds: dict[str, tuple[float, float]]
    population: float
    intervention_day: float | None = None
    subperiod_days: tuple[int, ...] = ()

    def __post_init__(self):
        expected = 10 if self.name == SEIR_HD else 7
        if len(self.compartments) != expected:
            raise ValueError(f"{self.name} needs {expected} compartments")

    @property
    def n_subperiods(self) -> int:
        return len(self.subperiod_days) + 1

    def make_parametrization(self, values: dict[str, float],
                             subperiod_values: dict[str, tuple[float, ...]] | None = None) -> Parametrization:
        missing = set(self.calibrated_names) - set(values)
        if missing:
            raise ValueError(f"missing calibrated parameters: {sorted(missing)}")
        return Parametrization(
            calibrated=dict(values),
            fixed=dict(self.fixed),
            bounds=dict(self.bounds),
            subperiod_boundaries=self.subperiod_days,
            subperiod_values=dict(subperiod_values or {}),
        )

    def initial_state(self, theta: Parametrization) -> np.ndarray:
        e0 = theta.calibrated.get("e0", theta.fixed.get("e0", 0.0))
        y0 = np.zeros(len(self.compartments))
        y0[0] = self.population - e0
        y0[1] = e0
        return y0

    def system(self, theta: Parametrization, npi=None):
        if self.name == SEIR_HD:
            return _SeirHdSystem(self, theta, npi)
        return _SaphireSystem(self, theta, npi)

    def integrate(self, theta: Parametrization, horizon: int,
                  init=None, dt: float = DEFAULT_DT, npi=None) -> Trajectory:
        if init is None:
            init = self.initial_state(theta)
        return integrate(
            self.system(theta, npi=npi), init, horizon,
            dt=dt, eps_neg=1e-9 * self.population,
        )


class _SeirHdSystem:
    """Flow-rate callback for the 10-compartment family."""

    flows = (
        FlowSpec("S->E", 0, 1),
        FlowSpec("E->IP", 1, 2),
        FlowSpec("E->IA", 1, 5),
        FlowSpec("IP->IS", 2, 3),
        FlowSpec("IP->IM", 2, 4),
        FlowSpec("IS->HD", 3, 6),
        FlowSpec("IS->HR", 3, 7),
        FlowSpec("IM->R", 4, 8),
        FlowSpec("IA->R", 5, 8),
        FlowSpec("HD->D", 6, 9),
        FlowSpec("HR->R", 7, 8),
    )

    def __init__(self, model: EpiModel, theta: Parametrization, npi=None):
        p = {**theta.fixed, **theta.calibrated}
        self.beta0 = p["beta0"]
        self.beta_post = p["beta0"] * (1.0 - p["sigma"])
        switch = model.intervention_day
        self.switch = float("inf") if switch is None else float(switch)
        self.inv_latent = 1.0 / p["latent_period"]
        self.inv_presym = 1.0 / p["presym_period"]
        self.inv_severe = 1.0 / p["severe_period"]
        self.inv_mild = 1.0 / p["mild_period"]
        self.inv_asym = 1.0 / p["asym_period"]
        self.inv_hd = 1.0 / p["hosp_death_period"]
        self.inv_hr = 1.0 / p["hosp_recover_period"]
        self.alpha = p["alpha"]
        self.frac_severe = p["frac_severe"]
        self.frac_fatal = p["frac_fatal"]
        self.inv_n = 1.0 / model.population
        self.k_presym = p["rel_inf_presym"]
        self.k_severe = p["rel_inf_severe"]
        self.k_mild = p["rel_inf_mild"]
        self.k_asym = p["rel_inf_asym"]
        if npi is None:
            self.npi_start = float("inf")
            self.k_presym_npi = self.k_severe_npi = self.k_mild_npi = self.k_asym_npi = 0.0
        else:
            start, w_presym, w_severe, w_mild, w_asym = npi
            self.npi_start = float(start)
            # weights folded into the relative-infectiousness factors so a
            # weight of exactly 1.0 reproduces baseline arithmetic bit for bit
            self.k_presym_npi = self.k_presym * w_presym
            self.k_severe_npi = self.k_severe * w_severe
            self.k_mild_npi = self.k_mild * w_mild
            self.k_asym_npi = self.k_asym * w_asym

    def rates(self, t, y):
        S, E, IP, IS, IM, IA, HD, HR, R, D = y
        beta = self.beta0 if t < self.switch else self.beta_post
        if t < self.npi_start:
            load = (self.k_presym * IP + self.k_severe * IS
                    + self.k_mild * IM + self.k_asym * IA)
        else:
            load = (self.k_presym_npi * IP + self.k_severe_npi * IS
                    + self.k_mild_npi * IM + self.k_asym_npi * IA)
        f_inf = beta * load * self.inv_n * S
        e_out = E * self.inv_latent
        p_out = IP * self.inv_presym
        s_out = IS * self.inv_severe
        f_e_ip = (1.0 - self.alpha) * e_out
        f_e_ia = self.alpha * e_out
        f_ip_is = self.frac_severe * p_out
        f_ip_im = (1.0 - self.frac_severe) * p_out
        f_is_hd = self.frac_fatal * s_out
        f_is_hr = (1.0 - self.frac_fatal) * s_out
        f_im_r = IM * self.inv_mild
        f_ia_r = IA * self.inv_asym
        f_hd_d = HD * self.inv_hd
        f_hr_r = HR * self.inv_hr
        dy = (
            -f_inf,
            f_inf - f_e_ip - f_e_ia,
            f_e_ip - f_ip_is - f_ip_im,
            f_ip_is - f_is_hd - f_is_hr,
            f_ip_im - f_im_r,
            f_e_ia - f_ia_r,
            f_is_hd - f_hd_d,
            f_is_hr - f_hr_r,
            f_im_r + f_ia_r + f_hr_r,
            f_hd_d,
        )
        return dy, (f_inf, f_e_ip, f_e_ia, f_ip_is, f_ip_im, f_is_hd,
                    f_is_hr, f_im_r, f_ia_r, f_hd_d, f_hr_r)

    def flow_rates(self, t, y):
        return self.rates(t, y)[1]


class _SaphireSystem:
    """Flow-rate callback for the 7-compartment family."""

    flows = (
        FlowSpec("S->E", 0, 1),
        FlowSpec("E->P", 1, 2),
        FlowSpec("P->I", 2, 3),
        FlowSpec("P->A", 2, 4),
        FlowSpec("I->H", 3, 5),
        FlowSpec("I->R", 3, 6),
        FlowSpec("A->R", 4, 6),
        FlowSpec("H->R", 5, 6),
    )

    def __init__(self, model: EpiModel, theta: Parametrization, npi=None):
        if npi is not None:
            raise ValueError("NPI weights are defined for the seir_hd family only")
        p = {**theta.fixed, **theta.calibrated}
        self.beta = p["beta"]
        self.inv_latent = 1.0 / p["latent_period"]
        self.inv_presym = 1.0 / p["presym_period"]
        self.inv_inf = 1.0 / p["infectious_period"]
        self.hosp_fraction = p["hosp_fraction"]
        self.inv_hosp = 1.0 / p["hosp_period"]
        self.k_presym = p["rel_inf_presym"]
        self.k_inf = p["rel_inf_infectious"]
        self.inv_n = 1.0 / model.population
        schedule = theta.subperiod_values.get("r")
        if schedule:
            self.r_bounds = theta.subperiod_boundaries
            self.r_values = tuple(schedule)
        else:
            self.r_bounds = ()
            self.r_values = (p["r"],)

    def _r_at(self, t):
        r = self.r_values[0]
        for start, value in zip(self.r_bounds, self.r_values[1:]):
            if t >= start:
                r = value
        return r

    def rates(self, t, y):
        S, E, P, I, A, H, R = y
        # ascertained and unascertained share one infectiousness factor, so
        # transmission depends on I + A only, never on the r split
        f_inf = self.beta * (self.k_presym * P + self.k_inf * (I + A)) * self.inv_n * S
        f_e_p = E * self.inv_latent
        p_out = P * self.inv_presym
        r = self.r_values[0] if not self.r_bounds else self._r_at(t)
        f_p_i = r * p_out
        f_p_a = (1.0 - r) * p_out
        i_out = I * self.inv_inf
        f_i_h = self.hosp_fraction * i_out
        f_i_r = (1.0 - self.hosp_fraction) * i_out
        f_a_r = A * self.inv_inf
        f_h_r = H * self.inv_hosp
        dy = (
            -f_inf,
            f_inf - f_e_p,
            f_e_p - f_p_i - f_p_a,
            f_p_i - f_i_h - f_i_r,
            f_p_a - f_a_r,
            f_i_h - f_h_r,
            f_i_r + f_a_r + f_h_r,
        )
        return dy, (f_inf, f_e_p, f_p_i, f_p_a, f_i_h, f_i_r, f_a_r, f_h_r)

    def flow_rates(self, t, y):
        return self.rates(t, y)[1]


@dataclass(frozen=True)
class ModelOutputs:
    """Daily observable sequences produced by one simulation."""

    daily_reported: np.ndarray
    daily_unreported: np.ndarray
    daily_total: np.ndarray
    population: float
    symptomatic_count: np.ndarray | None = None
    trajectory: Trajectory | None = None


def simulate_outputs(model: EpiModel, theta: Parametrization, horizon: int,
                     dt: float = DEFAULT_DT, npi=None) -> ModelOutputs:
    """Run the model and derive the reported/unreported/total observables."""
    traj = model.integrate(theta, horizon, dt=dt, npi=npi)
    if model.name == SEIR_HD:
        sympt_new = traj.flow("IP->IS") + traj.flow("IP->IM")
        asym_new = traj.flow("E->IA")
        alpha1 = theta.value_schedule("alpha1", horizon)
        reported = alpha1 * sympt_new
        unreported = (1.0 - alpha1) * sympt_new + asym_new
        is_idx = model.compartments.index("IS")
        im_idx = model.compartments.index("IM")
        sympt_count = traj.states[1:, is_idx] + traj.states[1:, im_idx]
    else:
        p_out = traj.flow("P->I") + traj.flow("P->A")
        r = theta.value_schedule("r", horizon)
        reported = r * p_out
        unreported = (1.0 - r) * p_out
        sympt_count = None
    return ModelOutputs(
        daily_reported=reported,
        daily_unreported=unreported,
        daily_total=reported + unreported,
        population=model.population,
        symptomatic_count=sympt_count,
        trajectory=traj,
    )


def reported_rate_of(outputs: ModelOutputs) -> float:
    """Scalar reported rate: sum of reported over sum of total infections."""
    total = float(outputs.daily_total.sum())
    if total <= 0.0:
        raise DegenerateEpidemic("total infections sum to zero")
    return float(outputs.daily_reported.sum()) / total


def symptomatic_rate(outputs: ModelOutputs) -> np.ndarray:
    """Per-day symptomatic occupancy fraction (IS + IM over population)."""
    if outputs.symptomatic_count is None:
        raise UnsupportedObservable(
            "model has no symptomatic compartments; use the seir_hd family"
        )
    return outputs.symptomatic_count / outputs.population


def cumulative_reported_rate(observed, outputs: ModelOutputs) -> float:
    """Observed reported sum over the model's total-infection sum.

    May exceed 1; values above 1 flag model underestimation of totals.
    """
    total = float(outputs.daily_total.sum())
    if total <= 0.0:
        raise DegenerateEpidemic("total infections sum to zero")
    return float(np.asarray(observed.daily).sum()) / total


def _named(name, fixed, bounds, population, intervention_day, subperiod_days):
    if name == SEIR_HD:
        return EpiModel(
            name=SEIR_HD,
            compartments=_SEIR_HD_COMPARTMENTS,
            calibrated_names=("beta0", "sigma", "e0", "alpha", "alpha1"),
            reporting_params=("alpha1",),
            fixed=fixed,
            bounds=bounds,
            population=population,
            intervention_day=intervention_day,
            subperiod_days=tuple(subperiod_days),
        )
    if name == SAPHIRE:
        return EpiModel(
            name=SAPHIRE,
            compartments=_SAPHIRE_COMPARTMENTS,
            calibrated_names=("beta", "r"),
            reporting_params=("r",),
            fixed=fixed,
            bounds=bounds,
            population=population,
            intervention_day=None,
            subperiod_days=tuple(subperiod_days),
        )
    raise ValueError(f"unknown model family {name!r}")


_UNSET = object()


def build_model(name: str, params=None, population: float | None = None,
                intervention_day=_UNSET, subperiod_days=()) -> EpiModel:
    """Construct a model family from a ModelParams bundle (defaults if None).

    population and intervention_day override the bundle when given;
    intervention_day=None disables the transmission switch entirely.
    """
    from .config import load_model_params

    bundle = params if params is not None else load_model_params()
    fixed, bounds = bundle.for_family(name)
    pop = population if population is not None else bundle.population
    if name == SEIR_HD:
        iday = bundle.intervention_day if intervention_day is _UNSET else intervention_day
    else:
        iday = None
    return _named(name, fixed, bounds, pop, iday, subperiod_days)


def with_subperiods(model: EpiModel, subperiod_days) -> EpiModel:
    return replace(model, subperiod_days=tuple(int(d) for d in subperiod_days))
