"""Tests for the fixed-step RK4 integrator, observers and parameter switches."""
import logging
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from hypersync.control import ControlledField
from hypersync.dynamics import check_resonance, draw_frequencies
from hypersync.exceptions import DimensionError, DivergenceError, ParameterError, ResonanceError
from hypersync.hypergraph import all_to_all
from hypersync.integrate import SeriesRecorder, integrate, rk4_step, switch_steps
from hypersync.models import ControlSpec, IntegrationPlan, ModelParams, ParameterSwitch
from hypersync.validation import rk4_convergence_factors


def decay(y):
    return -y


def oscillator(y):
    return np.array([y[1], -y[0]])


class TestStep:
    """Test single steps and convergence order."""

    def test_constant_field(self):
        """Test a constant field advances linearly."""
        result = integrate(lambda y: np.full_like(y, 2.0), np.zeros(3), IntegrationPlan(t_end=1.0, dt=0.1))
        np.testing.assert_allclose(result.final, 2.0, atol=1e-12)

    def test_exponential_decay(self):
        """Test y' = -y reaches exp(-1) at t = 1 within 1e-6."""
        result = integrate(decay, np.array([1.0]), IntegrationPlan(t_end=1.0, dt=0.1))
        assert result.final[0] == pytest.approx(np.exp(-1.0), abs=1e-6)

    def test_single_step(self):
        """Test one step against the Taylor polynomial of exp(-dt)."""
        dt = 0.1
        expected = 1 - dt + dt ** 2 / 2 - dt ** 3 / 6 + dt ** 4 / 24
        assert rk4_step(decay, np.array([1.0]), dt)[0] == pytest.approx(expected, abs=1e-14)

    def test_harmonic_oscillator(self):
        """Test the oscillator keeps its energy over t in [0, 10]."""
        result = integrate(oscillator, np.array([1.0, 0.0]), IntegrationPlan(t_end=10.0, dt=0.01))
        energy = 0.5 * np.sum(result.final ** 2)
        assert energy == pytest.approx(0.5, abs=1e-7)
        np.testing.assert_allclose(result.final, [np.cos(10.0), -np.sin(10.0)], atol=1e-7)

    def test_fourth_order(self):
        """Test halving dt divides the error by about 16."""
        for factor in rk4_convergence_factors():
            assert 14.0 <= factor <= 18.0


class TestDriver:
    """Test observers, determinism and failure handling."""

    def test_observer_times(self):
        """Test observers run at t0, every sample_every steps and at t_end."""
        recorder = SeriesRecorder(lambda y, f: y[0], "y")
        integrate(decay, np.array([1.0]), IntegrationPlan(t_end=1.0, dt=0.1, sample_every=3), [recorder])
        times = [t for t, _ in recorder.samples]
        np.testing.assert_allclose(times, [0.0, 0.3, 0.6, 0.9, 1.0], atol=1e-12)

    def test_record(self):
        """Test recorded states match the observer cadence."""
        result = integrate(decay, np.array([1.0]), IntegrationPlan(t_end=0.5, dt=0.1), record=True)
        assert len(result.times) == 6
        assert result.series[-1][1][0] == result.final[0]

    def test_determinism(self):
        """Test two runs are bit-identical."""
        h = all_to_all(6)
        omega = draw_frequencies(h, np.random.default_rng(3))
        check_resonance(h, omega)
        p = ModelParams(k1=1.0, k2=1.0, omega=omega)
        field = ControlledField(h, p, ControlSpec.all_nodes(6))
        theta0 = np.linspace(0.0, 0.3, 6)
        plan = IntegrationPlan(t_end=2.0, dt=0.1)
        a = integrate(field, theta0, plan).final
        b = integrate(field, theta0, plan).final
        np.testing.assert_array_equal(a, b)

    def test_arithmetic_frequencies_are_resonant(self):
        """Test evenly spaced frequencies trip the resonance guard of a controlled field."""
        h = all_to_all(6)
        p = ModelParams(k1=1.0, k2=1.0, omega=np.linspace(0.1, 0.9, 6))
        with pytest.raises(ResonanceError):
            ControlledField(h, p, ControlSpec.all_nodes(6))

    def test_null_switch(self):
        """Test switching to identical parameters changes nothing."""
        h = all_to_all(5)
        p = ModelParams(k1=0.5, k2=0.5, omega=np.linspace(0.1, 0.5, 5))
        field = ControlledField(h, p, ControlSpec())
        theta0 = np.linspace(0.0, 1.0, 5)
        plain = integrate(field, theta0, IntegrationPlan(t_end=3.0, dt=0.1)).final
        switched = integrate(
            field, theta0, IntegrationPlan(t_end=3.0, dt=0.1, switches=(ParameterSwitch(time=1.5, params=p),))
        ).final
        np.testing.assert_array_equal(plain, switched)

    def test_switch_takes_effect(self):
        """Test a coupling switch changes the trajectory after the switch time."""
        h = all_to_all(5)
        p = ModelParams(k1=0.1, k2=0.1, omega=np.linspace(0.1, 0.5, 5))
        field = ControlledField(h, p, ControlSpec())
        theta0 = np.linspace(0.0, 1.0, 5)
        switch = ParameterSwitch(time=1.0, params=p.with_couplings(k1=3.0, k2=3.0))
        a = integrate(field, theta0, IntegrationPlan(t_end=2.0, dt=0.1), record=True)
        b = integrate(field, theta0, IntegrationPlan(t_end=2.0, dt=0.1, switches=(switch,)), record=True)
        for t, x, y in zip(a.times, a.states, b.states):
            if t <= 1.0 + 1e-9:
                np.testing.assert_array_equal(x, y)
        assert not np.array_equal(a.final, b.final)

    def test_switch_snapping(self, caplog):
        """Test off-grid switch times are snapped with a warning."""
        p = ModelParams(omega=[0.0])
        plan = IntegrationPlan(t_end=1.0, dt=0.1, switches=(ParameterSwitch(time=0.34, params=p),))
        with caplog.at_level(logging.WARNING):
            steps = switch_steps(plan)
        assert steps[0][0] == 3
        assert "snapped" in caplog.text

    def test_switch_needs_switchable_field(self):
        """Test switches on a plain function are rejected."""
        p = ModelParams(omega=[0.0])
        plan = IntegrationPlan(t_end=1.0, dt=0.1, switches=(ParameterSwitch(time=0.5, params=p),))
        with pytest.raises(ParameterError):
            integrate(decay, np.array([1.0]), plan)

    def test_divergence(self):
        """Test a blow-up raises with the failing time."""
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergenceError) as info:
                integrate(lambda y: y ** 2, np.array([1.0]), IntegrationPlan(t_end=5.0, dt=0.1))
        assert 0.0 < info.value.t <= 5.0

    def test_shape_mismatch(self):
        """Test a field returning the wrong shape is rejected."""
        with pytest.raises(DimensionError):
            integrate(lambda y: np.zeros(2), np.zeros(3), IntegrationPlan(t_end=1.0, dt=0.1))
