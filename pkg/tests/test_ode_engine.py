import math

import numpy as np
import pytest

from mdl_epi.errors import NegativityViolation, NumericalBlowup
from mdl_epi.ode_engine import FlowSpec, integrate

from fixtures import seir_hd_fixture


class ExponentialDecay:
    """x' = -x as a single flow leaving the system."""

    flows = (FlowSpec("decay", 0, None),)

    def flow_rates(self, t, y):
        return (y[0],)


class ZeroDynamics:
    flows = ()

    def flow_rates(self, t, y):
        return ()


class BlowUp:
    flows = (FlowSpec("grow", None, 0),)

    def flow_rates(self, t, y):
        return (y[0] * y[0],)


class GoesNegative:
    """Constant outflow regardless of the remaining mass."""

    flows = (FlowSpec("drain", 0, None),)

    def flow_rates(self, t, y):
        return (5.0,)


def _decay_error(dt):
    traj = integrate(ExponentialDecay(), [1.0], horizon=10, dt=dt)
    return abs(traj.states[-1, 0] - math.exp(-10.0))


class TestIntegrate:
    def test_exponential_decay_closed_form(self):
        assert _decay_error(0.1) < 1e-8

    def test_fourth_order_convergence(self):
        ratio = _decay_error(0.1) / _decay_error(0.05)
        assert ratio >= 14.0

    def test_zero_dynamics_constant(self):
        traj = integrate(ZeroDynamics(), [4.0, 7.0], horizon=5)
        np.testing.assert_array_equal(traj.states, np.tile([4.0, 7.0], (6, 1)))

    def test_blowup_detected(self):
        with pytest.raises(NumericalBlowup):
            integrate(BlowUp(), [1.0], horizon=50)

    def test_negativity_beyond_tolerance_raises(self):
        with pytest.raises(NegativityViolation):
            integrate(GoesNegative(), [1.0], horizon=2, eps_neg=1e-9)

    def test_tiny_negative_excursion_clamped(self):
        traj = integrate(GoesNegative(), [1.0], horizon=2, eps_neg=10.0)
        assert np.all(traj.states >= 0.0)

    def test_daily_flow_equals_integral(self):
        # integral of x(t)=e^-t over each day; stage-weighted quadrature is
        # a notch less accurate than the state itself
        traj = integrate(ExponentialDecay(), [1.0], horizon=3)
        for day in range(3):
            expected = math.exp(-day) - math.exp(-(day + 1))
            assert traj.daily_flows[day, 0] == pytest.approx(expected, rel=1e-5)

    def test_rejects_uneven_dt(self):
        with pytest.raises(ValueError):
            integrate(ExponentialDecay(), [1.0], horizon=1, dt=0.3)

    def test_rejects_negative_initial_state(self):
        with pytest.raises(ValueError):
            integrate(ExponentialDecay(), [-1.0], horizon=1)


class TestEpidemicTrajectories:
    def test_population_conserved_200_days(self):
        model, theta, _, _ = seir_hd_fixture(horizon=1)
        traj = model.integrate(theta, horizon=200)
        totals = traj.states.sum(axis=1)
        rel = np.max(np.abs(totals - totals[0])) / totals[0]
        assert rel <= 1e-9

    def test_flows_nonnegative(self):
        model, theta, _, _ = seir_hd_fixture(horizon=1)
        traj = model.integrate(theta, horizon=120)
        assert np.all(traj.daily_flows >= 0.0)

    def test_flows_consistent_with_state_changes(self):
        model, theta, _, _ = seir_hd_fixture(horizon=1)
        traj = model.integrate(theta, horizon=120)
        names = traj.flow_names
        # net change of each compartment over each day must equal its
        # inflow minus outflow accumulated over the same day
        comp = model.compartments
        incoming = {c: [] for c in comp}
        outgoing = {c: [] for c in comp}
        for name in names:
            src, dst = name.split("->")
            outgoing[src].append(name)
            incoming[dst].append(name)
        scale = np.max(np.abs(traj.states))
        for i, c in enumerate(comp):
            delta = np.diff(traj.states[:, i])
            net = np.zeros_like(delta)
            for n in incoming[c]:
                net += traj.flow(n)
            for n in outgoing[c]:
                net -= traj.flow(n)
            np.testing.assert_allclose(delta, net, atol=1e-6 * scale)

    def test_no_epidemic_fixed_point(self):
        model, _, _, _ = seir_hd_fixture(horizon=1)
        theta = model.make_parametrization(
            {"beta0": 0.05, "sigma": 0.0, "e0": 1.0, "alpha": 0.0, "alpha1": 1.0}
        )
        # zero seed: S stays put, no infection flows ever fire
        init = np.zeros(len(model.compartments))
        init[0] = model.population
        traj = model.integrate(theta, horizon=30, init=init)
        np.testing.assert_array_equal(traj.states[:, 0], np.full(31, model.population))
        assert np.all(traj.flow("S->E") == 0.0)
        assert np.all(traj.flow("E->IA") == 0.0)
