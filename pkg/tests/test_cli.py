"""Tests for configuration loading and the command-line front end."""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pytest

from hypersync.cli import initial_condition, load_config, main, parse_overrides
from hypersync.exceptions import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, ConfigError
from hypersync.hypergraph import load_hypergraph

TINY = ["--set", "n=5", "--set", "t_end=4", "--set", "r_hat_t0=2", "--set", "replicates=1"]


def data_rows(path: Path):
    return [line for line in path.read_text().splitlines() if line and not line.startswith("#")][1:]


class TestConfig:
    """Test configuration precedence and validation."""

    def test_defaults(self):
        """Test defaults without file or overrides."""
        cfg = load_config()
        assert cfg.topology == "all_to_all"
        assert cfg.dt == 0.1

    def test_precedence(self, tmp_path):
        """Test flags override --set, which overrides the file."""
        path = tmp_path / "exp.env"
        path.write_text("n=10\nk1=0.5\nseed=3\n")
        cfg = load_config(path, ["k1=0.7", "seed=4"], seed=9, out=tmp_path / "out")
        assert cfg.n == 10
        assert cfg.k1 == 0.7
        assert cfg.seed == 9
        assert cfg.out == tmp_path / "out"

    def test_bad_override(self):
        """Test malformed overrides and unknown keys are configuration errors."""
        with pytest.raises(ConfigError):
            parse_overrides(["k1"])
        with pytest.raises(ConfigError):
            load_config(None, ["nonsense=1"])
        with pytest.raises(ConfigError):
            load_config(None, ["dt=-1"])

    def test_missing_file(self, tmp_path):
        """Test a missing config file is a configuration error."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.env")

    def test_triadic_sign(self):
        """Test the sign accepts config strings and defaults to +1."""
        assert load_config().triadic_sign == 1
        assert load_config(None, ["triadic_sign=-1"]).triadic_sign == -1
        with pytest.raises(ConfigError):
            load_config(None, ["triadic_sign=2"])

    def test_full_circle_phases(self):
        """Test full-circle runs widen the phase range unless theta_high is given."""
        assert initial_condition(load_config(), full_circle=True).theta_high == pytest.approx(6.283185307179586)
        cfg = load_config(None, ["theta_high=1.0"])
        assert initial_condition(cfg, full_circle=True).theta_high == 1.0


class TestCommands:
    """Test the subcommands end to end on tiny configurations."""

    def test_sweep(self, tmp_path):
        """Test a 1x1 sweep writes one data row and reruns byte-identically."""
        args = ["sweep", *TINY, "--set", "k1_values=1", "--set", "k2_values=1", "--seed", "3"]
        args += ["--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        first = (tmp_path / "rhat_map.csv").read_bytes()
        assert main(args) == EXIT_OK
        assert (tmp_path / "rhat_map.csv").read_bytes() == first
        rows = data_rows(tmp_path / "rhat_map.csv")
        assert len(rows) == 1
        assert rows[0].startswith("1.0,1.0,full,")

    def test_plot_script(self, tmp_path):
        """Test --plot-script writes a gnuplot file next to the CSV."""
        args = ["trajectory", *TINY, "--out", str(tmp_path), "--plot-script"]
        assert main(args) == EXIT_OK
        assert (tmp_path / "trajectory.csv").exists()
        assert "plot" in (tmp_path / "trajectory.gp").read_text()

    def test_pin(self, tmp_path):
        """Test the pinning command writes one row per pinned count and coupling pair."""
        args = ["pin", *TINY, "--set", "m_values=0,5", "--set", "pin_couplings=1/1,0.5/1", "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        rows = data_rows(tmp_path / "pin_sweep.csv")
        assert len(rows) == 4
        assert rows[0].startswith("0,")

    def test_basin(self, tmp_path):
        """Test a single-condition basin run."""
        assert main(["basin", *TINY, "--set", "n_ic=1", "--out", str(tmp_path)]) == EXIT_OK
        assert len(data_rows(tmp_path / "basins.csv")) == 3

    def test_switch(self, tmp_path):
        """Test the switch command writes one row per sample."""
        args = ["switch", *TINY, "--set", "t_switch=2", "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert len(data_rows(tmp_path / "switch.csv")) == 41

    def test_cost_grid(self, tmp_path):
        """Test the cost command adds a median-cost map when asked."""
        args = ["cost", *TINY, "--set", "k1_values=1", "--set", "k2_values=0.5,1", "--set", "cost_grid=true"]
        assert main(args + ["--out", str(tmp_path)]) == EXIT_OK
        assert len(data_rows(tmp_path / "cost.csv")) == 2
        assert len(data_rows(tmp_path / "cost_map.csv")) == 4

    def test_gen(self, tmp_path):
        """Test gen writes a loadable hypergraph."""
        args = ["gen", "--set", "topology=random_sc", "--set", "n=12", "--set", "k1_deg=5",
                "--set", "k2_deg=2", "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        h = load_hypergraph(tmp_path / "hypergraph.txt")
        assert h.n == 12

    def test_config_error_exit(self, tmp_path):
        """Test invalid configuration exits with the configuration code."""
        assert main(["sweep", "--set", "bogus=1", "--out", str(tmp_path)]) == EXIT_CONFIG


class TestValidate:
    """Test the validate command."""

    def test_passes(self, capsys):
        """Test the self-checks pass with the default sign."""
        assert main(["validate"]) == EXIT_OK
        assert "ALL CHECKS PASSED" in capsys.readouterr().out

    def test_flip_sign_fails(self, capsys):
        """Test the negative triadic sign fails the embedding check."""
        assert main(["validate", "--flip-sign"]) == EXIT_FAILURE
        out = capsys.readouterr().out
        assert "FAIL  embedding_equivalence" in out

    def test_corrupted_hypergraph(self, tmp_path):
        """Test a corrupted hypergraph file exits with the configuration code."""
        path = tmp_path / "bad.txt"
        path.write_text("n 3\ne 0 0\n")
        assert main(["validate", "--hypergraph", str(path)]) == EXIT_CONFIG
