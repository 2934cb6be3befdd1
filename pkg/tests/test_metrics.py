import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdl_epi.errors import ShapeError
from mdl_epi.metrics import (
    EvalReport,
    build_report,
    compare_serology,
    pearson,
    rho,
    rmse,
    write_tidy_csv,
)
from mdl_epi.models import ModelOutputs
from mdl_epi.timeseries import SeroEstimate

D0 = dt.date(2020, 3, 1)


class TestRmse:
    def test_zero_when_equal(self):
        assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_three_four_five(self):
        # no 1/T factor: sqrt(9 + 16) = 5
        assert rmse([3.0, 4.0], [0.0, 0.0]) == 5.0

    def test_single_element_absolute_difference(self):
        assert rmse([7.0], [4.5]) == pytest.approx(2.5)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            rmse([1.0], [1.0, 2.0])

    @given(st.floats(-100, 100), st.integers(1, 50))
    def test_translation_scaling(self, c, n):
        y = np.linspace(0, 10, n)
        assert rmse(y + c, y) == pytest.approx(abs(c) * math.sqrt(n), rel=1e-9)


class TestRho:
    def test_double(self):
        assert rho(10.0, 5.0) == 2.0

    def test_parity(self):
        assert rho(5.0, 5.0) == 1.0

    def test_zero_candidate_error_is_infinite(self):
        assert rho(3.0, 0.0) == math.inf

    def test_both_zero_is_one(self):
        assert rho(0.0, 0.0) == 1.0

    @given(st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
    def test_reciprocal_product(self, a, b):
        assert rho(a, b) * rho(b, a) == pytest.approx(1.0, rel=1e-9)

    def test_plausible_magnitudes(self):
        # regression guard: ratios on the benchmark fixtures live in this
        # range; see the acceptance suite for the end-to-end check
        for value in (1.20, 5.47, 7.21, 1.79):
            assert 1.0 < value < 10.0


def _outputs(daily_total):
    daily_total = np.asarray(daily_total, dtype=float)
    return ModelOutputs(
        daily_reported=daily_total * 0.5,
        daily_unreported=daily_total * 0.5,
        daily_total=daily_total,
        population=1e5,
    )


class TestCompareSerology:
    def test_hand_prefix_sum(self):
        base = _outputs([10.0, 20.0, 30.0, 40.0, 50.0])
        mdl = _outputs([20.0, 40.0, 60.0, 80.0, 100.0])
        # comparison lands on day index 2: collection starts day 9
        sero = [SeroEstimate(D0 + dt.timedelta(days=9), D0 + dt.timedelta(days=16),
                             80.0, 50.0, 120.0)]
        points = compare_serology(base, mdl, sero, D0)
        assert len(points) == 1
        assert points[0].date == D0 + dt.timedelta(days=2)
        assert points[0].model_cumulative_base == 60.0
        assert points[0].model_cumulative_mdl == 120.0
        assert points[0].sero_point == 80.0

    def test_before_timeline_records_zero(self):
        base = _outputs([10.0, 20.0])
        sero = [SeroEstimate(D0, D0 + dt.timedelta(days=7), 5.0, 1.0, 9.0)]
        points = compare_serology(base, base, sero, D0)
        assert points[0].model_cumulative_base == 0.0
        assert points[0].model_cumulative_mdl == 0.0

    def test_beyond_horizon_skipped_with_warning(self):
        base = _outputs([10.0, 20.0])
        sero = [SeroEstimate(D0 + dt.timedelta(days=30), D0 + dt.timedelta(days=37),
                             5.0, 1.0, 9.0)]
        with pytest.warns(UserWarning):
            points = compare_serology(base, base, sero, D0)
        assert points == []

    def test_identical_outputs_identical_columns(self):
        base = _outputs([10.0, 20.0, 30.0])
        sero = [SeroEstimate(D0 + dt.timedelta(days=8), D0 + dt.timedelta(days=15),
                             5.0, 1.0, 9.0)]
        points = compare_serology(base, base, sero, D0)
        assert points[0].model_cumulative_base == points[0].model_cumulative_mdl

    def test_order_independent(self):
        base = _outputs([10.0, 20.0, 30.0, 40.0])
        mk = lambda d: SeroEstimate(D0 + dt.timedelta(days=d), D0 + dt.timedelta(days=d + 7),
                                    5.0, 1.0, 9.0)
        fwd = compare_serology(base, base, [mk(8), mk(9)], D0)
        rev = compare_serology(base, base, [mk(9), mk(8)], D0)
        assert {p.date for p in fwd} == {p.date for p in rev}


class TestReport:
    def _report(self, **kw):
        return build_report(
            rmse_base_reported=10.0,
            rmse_mdl_reported=5.0,
            rho_rinf_observed=2.0,
            rho_rinf_forecast=3.0,
            config_echo={"seed": 42, "delta": 0.01, "grid_step": 0.01},
            **kw,
        )

    def test_roundtrip(self):
        report = self._report(rho_tinf=1.5)
        assert EvalReport.from_json(report.to_json()) == report

    def test_optional_block_absent_not_null(self):
        text = self._report().to_json()
        assert "symptomatic_trend" not in text
        assert "rho_tinf" not in text

    def test_config_echo_present(self):
        text = self._report().to_json()
        for key in ("seed", "delta", "grid_step"):
            assert key in text

    def test_infinite_rho_survives_roundtrip(self):
        report = self._report(rho_tinf=math.inf)
        assert EvalReport.from_json(report.to_json()).rho_tinf == math.inf

    def test_json_sorted_keys_deterministic(self):
        a = self._report().to_json()
        b = self._report().to_json()
        assert a == b


class TestPearson:
    def test_perfect_correlation(self):
        assert pearson([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)

    def test_anti_correlation(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_constant_input_returns_zero(self):
        assert pearson([1, 1, 1], [1, 2, 3]) == 0.0


def test_write_tidy_csv(tmp_path):
    path = tmp_path / "series.csv"
    write_tidy_csv(path, {"obs": np.array([1.0, 2.0])}, D0)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "series,date,value"
    assert lines[1] == "obs,2020-03-01,1.0"
    assert len(lines) == 3
