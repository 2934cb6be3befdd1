import datetime as dt

import numpy as np
import pytest

from mdl_epi.config import load_model_params, load_run_config
from mdl_epi.errors import ConfigError
from mdl_epi.models import build_model, simulate_outputs


class TestModelParams:
    def test_packaged_defaults_load(self):
        params = load_model_params()
        assert params.population > 0
        fixed, bounds = params.for_family("saphire")
        assert "latent_period" in fixed
        assert bounds["r"][0] < bounds["r"][1]

    def test_custom_file_overrides(self, tmp_path):
        path = tmp_path / "params.ini"
        path.write_text(
            """
[population]
n = 1000

[intervention_date]
day = none

[saphire.fixed]
latent_period = 2.0
presym_period = 1.0
infectious_period = 4.0
hosp_fraction = 0.0
hosp_period = 10.0
rel_inf_presym = 1.0
rel_inf_infectious = 1.0
e0 = 5.0

[saphire.bounds]
beta = 0.1, 1.0
r = 0.05, 0.95
"""
        )
        params = load_model_params(path)
        assert params.population == 1000.0
        assert params.intervention_day is None
        model = build_model("saphire", params=params)
        theta = model.make_parametrization({"beta": 0.5, "r": 0.5})
        out = simulate_outputs(model, theta, 20)
        assert out.population == 1000.0
        assert out.daily_total.sum() > 0

        with pytest.raises(ConfigError):
            params.for_family("seir_hd")

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            load_model_params(tmp_path / "absent.ini")

    def test_bad_bounds_rejected(self, tmp_path):
        path = tmp_path / "params.ini"
        path.write_text(
            "[population]\nn = 10\n[saphire.fixed]\ne0 = 1\n"
            "[saphire.bounds]\nbeta = 1.0\n"
        )
        with pytest.raises(ConfigError):
            load_model_params(path)


class TestRunConfig:
    def _minimal(self, tmp_path, body=""):
        path = tmp_path / "run.ini"
        path.write_text(
            "[run]\nmodel = saphire\n"
            "[data]\ncases_csv = c.csv\nregion = R\n"
            "[split]\nobserved_end = 2020-05-31\n" + body
        )
        return path

    def test_defaults_applied(self, tmp_path):
        cfg = load_run_config(self._minimal(tmp_path))
        assert cfg.seed == 42
        assert cfg.smooth is True
        assert cfg.delta == 0.01
        assert cfg.use_default_subperiods is True
        assert cfg.observed_end == dt.date(2020, 5, 31)

    def test_calibration_section_parsed(self, tmp_path):
        cfg = load_run_config(self._minimal(
            tmp_path, "[calibration]\nrestarts = 8\nmax_iters = 2000\nseed = 7\ntol = 1e-6\n"
        ))
        assert (cfg.restarts, cfg.max_iters, cfg.seed) == (8, 2000, 7)
        assert cfg.convergence_tol == 1e-6

    def test_explicit_boundaries_disable_default_blocks(self, tmp_path):
        cfg = load_run_config(self._minimal(
            tmp_path, "subperiod_boundaries = 2020-04-01\n"
        ))
        assert cfg.subperiod_boundaries == (dt.date(2020, 4, 1),)
        assert cfg.use_default_subperiods is False

    def test_missing_required_key(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[run]\nmodel = saphire\n")
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_unknown_model_rejected(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(
            "[run]\nmodel = sirv\n[data]\ncases_csv = c.csv\nregion = R\n"
            "[split]\nobserved_end = 2020-05-31\n"
        )
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_echo_contains_reproducibility_keys(self, tmp_path):
        cfg = load_run_config(self._minimal(tmp_path))
        echo = cfg.echo()
        for key in ("seed", "delta", "grid_step", "restarts", "observed_end"):
            assert key in echo
