import datetime as dt

import numpy as np
import pytest

from mdl_epi import (
    ReportedSeries,
    build_model,
    cumulative_reported_rate,
    reported_rate_of,
    simulate_outputs,
    symptomatic_rate,
)
from mdl_epi.errors import DegenerateEpidemic, UnsupportedObservable
from mdl_epi.models import ModelOutputs, with_subperiods

from fixtures import SEIR_HD_TRUE, saphire_fixture, seir_hd_fixture


class TestObservableIdentities:
    def test_total_is_reported_plus_unreported_exact(self):
        for fixture in (saphire_fixture, seir_hd_fixture):
            _, _, out, _ = fixture(horizon=80)
            np.testing.assert_array_equal(
                out.daily_total, out.daily_reported + out.daily_unreported
            )

    def test_all_observables_nonnegative(self):
        _, _, out, _ = seir_hd_fixture(horizon=80)
        for seq in (out.daily_reported, out.daily_unreported, out.daily_total):
            assert np.all(seq >= 0.0)

    def test_saphire_full_reporting_means_no_unreported(self):
        model, _, _, _ = saphire_fixture(horizon=5)
        theta = model.make_parametrization({"beta": 0.7, "r": 1.0})
        out = simulate_outputs(model, theta, 30)
        np.testing.assert_array_equal(out.daily_unreported, np.zeros(30))

    def test_seir_hd_full_symptomatic_reporting_leaves_asym_only(self):
        model, _, _, _ = seir_hd_fixture(horizon=5)
        values = dict(SEIR_HD_TRUE, alpha1=1.0)
        theta = model.make_parametrization(values)
        out = simulate_outputs(model, theta, 60)
        traj = out.trajectory
        np.testing.assert_array_equal(out.daily_unreported, traj.flow("E->IA"))


class TestLinearityInReportingParameter:
    def test_saphire_reported_linear_in_r(self):
        model, _, _, _ = saphire_fixture(horizon=5)
        low = simulate_outputs(model, model.make_parametrization({"beta": 0.7, "r": 0.2}), 90)
        high = simulate_outputs(model, model.make_parametrization({"beta": 0.7, "r": 0.4}), 90)
        scale = np.max(high.daily_reported)
        assert np.max(np.abs(2.0 * low.daily_reported - high.daily_reported)) <= 1e-12 * scale

    def test_seir_hd_reported_linear_in_alpha1(self):
        model, _, _, _ = seir_hd_fixture(horizon=5)
        low = simulate_outputs(
            model, model.make_parametrization(dict(SEIR_HD_TRUE, alpha1=0.2)), 90
        )
        high = simulate_outputs(
            model, model.make_parametrization(dict(SEIR_HD_TRUE, alpha1=0.4)), 90
        )
        # alpha1 never enters the dynamics, so this is exact
        np.testing.assert_array_equal(2.0 * low.daily_reported, high.daily_reported)


class TestReportedRate:
    def test_simple_ratio(self):
        out = ModelOutputs(
            daily_reported=np.array([1.0, 1.0]),
            daily_unreported=np.array([1.0, 1.0]),
            daily_total=np.array([2.0, 2.0]),
            population=1e5,
        )
        assert reported_rate_of(out) == 0.5

    def test_boundary_full_reporting(self):
        out = ModelOutputs(
            daily_reported=np.array([2.0, 2.0]),
            daily_unreported=np.array([0.0, 0.0]),
            daily_total=np.array([2.0, 2.0]),
            population=1e5,
        )
        assert reported_rate_of(out) == 1.0

    def test_uneven_profile(self):
        out = ModelOutputs(
            daily_reported=np.array([3.0, 1.0]),
            daily_unreported=np.array([1.0, 3.0]),
            daily_total=np.array([4.0, 4.0]),
            population=1e5,
        )
        assert reported_rate_of(out) == 0.5

    def test_zero_total_degenerate(self):
        out = ModelOutputs(
            daily_reported=np.zeros(3),
            daily_unreported=np.zeros(3),
            daily_total=np.zeros(3),
            population=1e5,
        )
        with pytest.raises(DegenerateEpidemic):
            reported_rate_of(out)

    def test_matches_r_exactly_for_saphire(self):
        _, _, out, _ = saphire_fixture(horizon=60)
        assert abs(reported_rate_of(out) - 0.25) <= 1e-9


class TestSymptomaticRate:
    def test_formula(self):
        model, theta, out, _ = seir_hd_fixture(horizon=60)
        rate = symptomatic_rate(out)
        traj = out.trajectory
        expected = (traj.states[1:, 3] + traj.states[1:, 4]) / model.population
        np.testing.assert_array_equal(rate, expected)
        assert np.all((rate >= 0) & (rate <= 1))

    def test_zero_when_no_symptomatics(self):
        model, _, _, _ = seir_hd_fixture(horizon=5)
        theta = model.make_parametrization(
            {"beta0": 0.6, "sigma": 0.3, "e0": 50.0, "alpha": 1.0, "alpha1": 0.5}
        )
        out = simulate_outputs(model, theta, 40)
        np.testing.assert_array_equal(symptomatic_rate(out), np.zeros(40))

    def test_saphire_unsupported(self):
        _, _, out, _ = saphire_fixture(horizon=30)
        with pytest.raises(UnsupportedObservable):
            symptomatic_rate(out)


class TestCumulativeReportedRate:
    def _outputs(self, total_sum):
        daily = np.full(4, total_sum / 4.0)
        return ModelOutputs(
            daily_reported=daily * 0.5,
            daily_unreported=daily * 0.5,
            daily_total=daily,
            population=1e5,
        )

    def _observed(self, total):
        return ReportedSeries(dt.date(2020, 3, 1), np.full(4, total / 4.0))

    def test_quarter(self):
        assert cumulative_reported_rate(self._observed(50.0), self._outputs(200.0)) == 0.25

    def test_zero_observed(self):
        assert cumulative_reported_rate(self._observed(0.0), self._outputs(200.0)) == 0.0

    def test_above_one_flags_underestimation(self):
        assert cumulative_reported_rate(self._observed(300.0), self._outputs(200.0)) == 1.5

    def test_zero_model_total_degenerate(self):
        zeros = ModelOutputs(
            daily_reported=np.zeros(4),
            daily_unreported=np.zeros(4),
            daily_total=np.zeros(4),
            population=1e5,
        )
        with pytest.raises(DegenerateEpidemic):
            cumulative_reported_rate(self._observed(10.0), zeros)


class TestParametrization:
    def test_bounds_enforced(self):
        model, _, _, _ = saphire_fixture(horizon=5)
        with pytest.raises(ValueError):
            model.make_parametrization({"beta": 99.0, "r": 0.25})

    def test_unit_interval_params_enforced(self):
        model, _, _, _ = seir_hd_fixture(horizon=5)
        bad = dict(SEIR_HD_TRUE, alpha=1.5)
        with pytest.raises(ValueError):
            model.make_parametrization(bad)

    def test_missing_parameter_rejected(self):
        model, _, _, _ = saphire_fixture(horizon=5)
        with pytest.raises(ValueError):
            model.make_parametrization({"beta": 0.7})

    def test_compartment_counts(self):
        assert len(build_model("seir_hd").compartments) == 10
        assert len(build_model("saphire").compartments) == 7

    def test_flat_values_roundtrip(self):
        model, theta, _, _ = saphire_fixture(horizon=5)
        assert theta.flat_names() == ("beta", "r")
        np.testing.assert_array_equal(theta.flat_values(), [0.7, 0.25])


class TestSubperiods:
    def test_schedule_applies_per_period(self):
        model = with_subperiods(build_model("saphire"), (30,))
        theta = model.make_parametrization(
            {"beta": 0.7, "r": 0.2}, subperiod_values={"r": (0.2, 0.6)}
        )
        sched = theta.value_schedule("r", 50)
        assert np.all(sched[:30] == 0.2)
        assert np.all(sched[30:] == 0.6)

    def test_reported_uses_period_rate(self):
        model = with_subperiods(build_model("saphire"), (30,))
        theta = model.make_parametrization(
            {"beta": 0.7, "r": 0.2}, subperiod_values={"r": (0.2, 0.6)}
        )
        out = simulate_outputs(model, theta, 60)
        p_out = out.trajectory.flow("P->I") + out.trajectory.flow("P->A")
        np.testing.assert_allclose(out.daily_reported[:30], 0.2 * p_out[:30], rtol=1e-12)
        np.testing.assert_allclose(out.daily_reported[30:], 0.6 * p_out[30:], rtol=1e-12)

    def test_flat_names_expand(self):
        model = with_subperiods(build_model("saphire"), (30,))
        theta = model.make_parametrization(
            {"beta": 0.7, "r": 0.2}, subperiod_values={"r": (0.2, 0.6)}
        )
        assert theta.flat_names() == ("beta", "r[0]", "r[1]")
        np.testing.assert_array_equal(theta.flat_values(), [0.7, 0.2, 0.6])

    def test_intervention_switch_reduces_transmission(self):
        model, theta, out, _ = seir_hd_fixture(horizon=120, intervention_day=60)
        no_switch, theta2, out2, _ = seir_hd_fixture(horizon=120, intervention_day=None)
        # identical before the switch, strictly lower infections after
        np.testing.assert_allclose(
            out.daily_total[:59], out2.daily_total[:59], rtol=1e-10
        )
        assert out.daily_total[70:].sum() < out2.daily_total[70:].sum()
