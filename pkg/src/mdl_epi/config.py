"""Config-file parsing: model parameters and run configuration.

Both files use INI syntax. The model-parameter file carries the fixed
values and calibration bounds for each model family plus the population
and the intervention day; a default copy ships with the package. The run
configuration wires data paths, the period split, calibration/encoding
settings and output options for the command line.
"""
from __future__ import annotations

import configparser
import datetime as dt
from dataclasses import dataclass, field
from importlib import resources

from .errors import ConfigError

_FAMILY_SECTIONS = {
    "seir_hd": ("seir_hd.fixed", "seir_hd.bounds"),
    "saphire": ("saphire.fixed", "saphire.bounds"),
}


@dataclass(frozen=True)
class ModelParams:
    """Parsed model-parameter bundle for both families."""

    fixed: dict[str, dict[str, float]]
    bounds: dict[str, dict[str, tuple[float, float]]]
    population: float
    intervention_day: float | None

    def for_family(self, name: str) -> tuple[dict[str, float], dict[str, tuple[float, float]]]:
        if name not in self.fixed:
            raise ConfigError(f"no parameters for model family {name!r}")
        return dict(self.fixed[name]), dict(self.bounds[name])


def _parse_bounds(raw: str) -> tuple[float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"bounds must be 'low, high', got {raw!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if hi < lo:
        raise ConfigError(f"bounds reversed: {raw!r}")
    return lo, hi


def load_model_params(path=None) -> ModelParams:
    """Parse a model-parameter file; with no path, the packaged defaults."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if path is None:
        text = resources.files("mdl_epi").joinpath("data/default_model_params.ini").read_text()
        parser.read_string(text)
    else:
        if not parser.read(path):
            raise ConfigError(f"cannot read model parameters from {path}")

    fixed: dict[str, dict[str, float]] = {}
    bounds: dict[str, dict[str, tuple[float, float]]] = {}
    for family, (fixed_sec, bounds_sec) in _FAMILY_SECTIONS.items():
        if fixed_sec not in parser or bounds_sec not in parser:
            continue
        fixed[family] = {k: float(v) for k, v in parser[fixed_sec].items()}
        bounds[family] = {k: _parse_bounds(v) for k, v in parser[bounds_sec].items()}
    if not fixed:
        raise ConfigError("model-parameter file defines no model family")

    try:
        population = float(parser["population"]["n"])
    except KeyError as exc:
        raise ConfigError("missing [population] n") from exc

    intervention_day = None
    if "intervention_date" in parser:
        raw = parser["intervention_date"].get("day", "none").strip().lower()
        if raw not in ("", "none"):
            intervention_day = float(raw)

    return ModelParams(
        fixed=fixed, bounds=bounds,
        population=population, intervention_day=intervention_day,
    )


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI run needs, resolved from file + flag overrides."""

    model: str
    cases_csv: str
    region: str
    observed_end: dt.date
    outdir: str
    seed: int = 42
    jobs: int = 1
    smooth: bool = True
    model_params_path: str | None = None
    serology_csv: str | None = None
    survey_csv: str | None = None
    subperiod_boundaries: tuple[dt.date, ...] = ()
    use_default_subperiods: bool = True
    restarts: int = 4
    max_iters: int = 300
    convergence_tol: float = 1e-8
    w_reported: float = 1.0
    w_total: float = 1.0
    delta: float = 0.01
    scenario_multiplier: float = 0.5
    scenario_start: dt.date | None = None
    intervention_date: dt.date | None = None
    config_path: str | None = None
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Reproducibility echo embedded in reports."""
        return {
            "model": self.model,
            "seed": self.seed,
            "delta": self.delta,
            "grid_step": 0.01,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "convergence_tol": self.convergence_tol,
            "smooth": self.smooth,
            "observed_end": self.observed_end.isoformat(),
        }


def _get(parser, section, key, default=None):
    if section in parser and key in parser[section]:
        return parser[section][key]
    return default


def load_run_config(path) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if not parser.read(path):
        raise ConfigError(f"cannot read run config from {path}")

    def require(section, key):
        value = _get(parser, section, key)
        if value is None:
            raise ConfigError(f"{path}: missing [{section}] {key}")
        return value

    model = require("run", "model").strip().lower()
    if model not in ("seir_hd", "saphire"):
        raise ConfigError(f"unknown model {model!r} (expected seir_hd or saphire)")

    boundaries_raw = _get(parser, "split", "subperiod_boundaries", "")
    boundaries = tuple(
        dt.date.fromisoformat(tok.strip())
        for tok in boundaries_raw.split(",") if tok.strip()
    )

    scenario_start_raw = _get(parser, "scenario", "start")
    intervention_raw = _get(parser, "run", "intervention_date")

    return RunConfig(
        model=model,
        cases_csv=require("data", "cases_csv"),
        region=require("data", "region"),
        observed_end=dt.date.fromisoformat(require("split", "observed_end")),
        outdir=_get(parser, "run", "outdir", "out"),
        seed=int(_get(parser, "calibration", "seed", 42)),
        jobs=int(_get(parser, "run", "jobs", 1)),
        smooth=_get(parser, "data", "smooth", "true").strip().lower() in ("1", "true", "yes"),
        model_params_path=_get(parser, "run", "model_params"),
        serology_csv=_get(parser, "data", "serology_csv"),
        survey_csv=_get(parser, "data", "survey_csv"),
        subperiod_boundaries=boundaries,
        use_default_subperiods=boundaries_raw.strip() == "",
        restarts=int(_get(parser, "calibration", "restarts", 4)),
        max_iters=int(_get(parser, "calibration", "max_iters", 300)),
        convergence_tol=float(_get(parser, "calibration", "tol", 1e-8)),
        w_reported=float(_get(parser, "calibration", "w_reported", 1.0)),
        w_total=float(_get(parser, "calibration", "w_total", 1.0)),
        delta=float(_get(parser, "encoding", "delta", 0.01)),
        scenario_multiplier=float(_get(parser, "scenario", "multiplier", 0.5)),
        scenario_start=dt.date.fromisoformat(scenario_start_raw) if scenario_start_raw else None,
        intervention_date=dt.date.fromisoformat(intervention_raw) if intervention_raw else None,
        config_path=str(path),
    )
