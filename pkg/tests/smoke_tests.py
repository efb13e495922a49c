"""Basic smoke tests for settings, models and helpers."""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from pydantic import ValidationError

from hypersync.exceptions import EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_IO, EXIT_RESONANCE, ResonanceError, OutputError
from hypersync.models import (
    ControlSpec,
    ExperimentConfig,
    IntegrationPlan,
    ModelParams,
    ParameterSwitch,
    SweepGrid,
    parse_float_list,
)
from hypersync.settings import settings
from hypersync.utils import derive_seed, format_header, write_csv


class TestSettings:
    """Test runtime settings."""

    def test_defaults(self):
        """Test numerical defaults."""
        assert settings.RESONANCE_TOL == 1e-6
        assert settings.DEFAULT_DT == 0.1
        assert settings.R_HAT_T0 < settings.R_HAT_T_FIN
        assert settings.TRIADIC_SIGN in (1, -1)

    def test_exit_codes_distinct(self):
        """Test that error classes map to distinct exit codes."""
        codes = {EXIT_CONFIG, EXIT_RESONANCE, EXIT_DIVERGENCE, EXIT_IO}
        assert len(codes) == 4
        assert ResonanceError("x").exit_code == EXIT_RESONANCE
        assert OutputError("x").exit_code == EXIT_IO


class TestModels:
    """Test Pydantic models."""

    def test_model_params_from_array(self):
        """Test ModelParams with a numpy frequency vector."""
        p = ModelParams(k1=1.0, k2=0.5, omega=np.array([0.1, 0.2, 0.3]))
        assert p.n == 3
        assert isinstance(p.omega, tuple)
        np.testing.assert_allclose(p.omega_array, [0.1, 0.2, 0.3])

    def test_model_params_negative_coupling(self):
        """Test ModelParams rejects negative couplings."""
        with pytest.raises(ValidationError):
            ModelParams(k1=-1.0, omega=[0.0])

    def test_model_params_copies(self):
        """Test coupling and frequency replacement."""
        p = ModelParams(k1=1.0, k2=2.0, omega=[0.0, 1.0], triadic_sign=-1)
        q = p.with_couplings(k2=3.0)
        assert (q.k1, q.k2, q.triadic_sign) == (1.0, 3.0, -1)
        assert p.with_omega([5.0, 6.0]).omega == (5.0, 6.0)

    def test_control_spec_duplicates(self):
        """Test ControlSpec rejects repeated pinned nodes."""
        with pytest.raises(ValidationError):
            ControlSpec(mode="full", pinned=(1, 1))

    def test_control_spec_none_is_inactive(self):
        """Test mode none ignores the pinned set."""
        spec = ControlSpec(mode="none", pinned=(0, 1))
        assert not spec.active
        assert spec.m == 0
        assert ControlSpec.all_nodes(4).pinned == (0, 1, 2, 3)

    def test_integration_plan_validation(self):
        """Test horizon and switch validation."""
        with pytest.raises(ValidationError):
            IntegrationPlan(t0=1.0, t_end=1.0)
        p = ModelParams(omega=[0.0])
        with pytest.raises(ValidationError):
            IntegrationPlan(t_end=10.0, switches=(ParameterSwitch(time=12.0, params=p),))
        with pytest.raises(ValidationError):
            IntegrationPlan(
                t_end=10.0,
                switches=(ParameterSwitch(time=5.0, params=p), ParameterSwitch(time=3.0, params=p)),
            )
        assert IntegrationPlan(t_end=40.0, dt=0.1).n_steps == 400

    def test_sweep_grid_ascending(self):
        """Test SweepGrid rejects unsorted axes."""
        with pytest.raises(ValidationError):
            SweepGrid(k1_values=[1.0, 0.5], k2_values=[0.0])

    def test_experiment_config_parsing(self):
        """Test list, range and pair parsing in ExperimentConfig."""
        cfg = ExperimentConfig(k1_values="0:2:5", k2_values="0,1", pin_couplings="1/1,0.5/1", m_values="0,10")
        assert cfg.k1_values == [0.0, 0.5, 1.0, 1.5, 2.0]
        assert cfg.k2_values == [0.0, 1.0]
        assert cfg.pin_couplings == [(1.0, 1.0), (0.5, 1.0)]
        assert cfg.m_values == [0, 10]

    def test_experiment_config_rejects_unknown(self):
        """Test unknown keys are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig(bogus=1)

    def test_experiment_config_file_topology_needs_path(self):
        """Test topology=file requires a path."""
        with pytest.raises(ValidationError):
            ExperimentConfig(topology="file")

    def test_parse_float_list(self):
        """Test list parsing helper."""
        assert parse_float_list("1, 2,3") == [1.0, 2.0, 3.0]
        assert parse_float_list("0:1:3") == [0.0, 0.5, 1.0]


class TestUtils:
    """Test helper functions."""

    def test_derive_seed_deterministic(self):
        """Test counter-based seeds depend only on their arguments."""
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
        assert 0 <= derive_seed(2 ** 64 - 1, 3) < 2 ** 64

    def test_write_csv_header(self, tmp_path):
        """Test CSV output with comment header."""
        path = write_csv(
            tmp_path / "sub" / "out.csv",
            ["a", "b"],
            [(1, 0.5), (2, float("nan"))],
            format_header({"n": 3}, 11),
        )
        lines = path.read_text().splitlines()
        assert lines[0] == "# seed=11"
        assert lines[1].startswith("# config=")
        assert lines[2] == "a,b"
        assert lines[3] == "1,0.5"
        assert lines[4] == "2,nan"
