import asyncio
from pathlib import Path

import pytest
from click.testing import CliRunner

from src.gaugelab import main as main_module
from src.gaugelab.config import config
from src.gaugelab.core.errors import BlowupError
from src.gaugelab.database.operations import ResultsDatabase
from src.gaugelab.dynamics.coefficients import CoefficientSet
from src.gaugelab.dynamics.propagator import BlowupDiagnostic, BlowupTrigger
from src.gaugelab.experiments import verify as verify_module
from src.gaugelab.main import cli

CONFIG_DIR = Path(__file__).parent.parent / "configs"

QUIET_SCAN = """\
kind = "blowup_scan"
name = "quiet_scan"

[grid]
points = [64]
lengths = [16.0]

[state]
family = "gaussian"

[coefficients]
mu2 = 0.1

[time]
t_final = 0.05
samples = 2

[blowup]
expect_blowup = false
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scan_config(tmp_path):
    path = tmp_path / "quiet_scan.toml"
    path.write_text(QUIET_SCAN)
    return path


class TestRun:
    """Test the run command."""

    def test_passing_run(self, runner, scan_config, tmp_path):
        out = tmp_path / "out"

        result = runner.invoke(cli, ["run", str(scan_config), "--out", str(out)])

        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in out.iterdir()) == ["quiet_scan.csv", "quiet_scan.gp", "quiet_scan.json"]

    def test_malformed_config(self, runner, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text(QUIET_SCAN.replace("t_final = 0.05", "t_final = -1.0"))
        out = tmp_path / "out"

        result = runner.invoke(cli, ["run", str(bad), "--out", str(out)])

        assert result.exit_code == 2
        assert "Configuration error" in result.output
        assert not out.exists()

    def test_missing_config(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", str(tmp_path / "absent.toml")])

        assert result.exit_code == 2

    def test_escaped_blowup_exits_3(self, runner, scan_config, tmp_path, monkeypatch):
        def blows_up(experiment, raw, output_dir):
            raise BlowupError(BlowupDiagnostic(0.02, BlowupTrigger.NORM_GROWTH, 20, 1.0, 11.0))

        monkeypatch.setattr(main_module, "execute", blows_up)

        result = runner.invoke(cli, ["run", str(scan_config), "--out", str(tmp_path / "out")])

        assert result.exit_code == 3
        assert "Blow-up" in result.output
        assert "norm_growth" in result.output

    def test_run_is_recorded(self, runner, scan_config, tmp_path, monkeypatch):
        monkeypatch.setattr(config, "RECORD_RUNS", True)

        result = runner.invoke(cli, ["run", str(scan_config), "--out", str(tmp_path / "out")])

        assert result.exit_code == 0, result.output
        runs = asyncio.run(ResultsDatabase(Path(config.DB_PATH)).get_recent_runs())
        assert [r["name"] for r in runs] == ["quiet_scan"]


class TestSweep:
    """Test the sweep command."""

    def test_sweep(self, runner, scan_config, tmp_path):
        out = tmp_path / "out"

        result = runner.invoke(
            cli,
            ["sweep", str(scan_config), "--param", "coefficients.mu2", "--values", "0,0.1", "--out", str(out)],
        )

        assert result.exit_code == 0, result.output
        assert (out / "quiet_scan__sweep.csv").exists()

    def test_empty_values(self, runner, scan_config):
        result = runner.invoke(cli, ["sweep", str(scan_config), "--param", "coefficients.mu2", "--values", ","])

        assert result.exit_code == 2

    def test_unknown_parameter(self, runner, scan_config):
        result = runner.invoke(cli, ["sweep", str(scan_config), "--param", "coefficients.mu9", "--values", "1"])

        assert result.exit_code == 2


class TestVerify:
    """Test the verify command."""

    def test_single_criterion(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["verify", "--only", "functional_correctness", "--quick", "--out", str(tmp_path / "v")]
        )

        assert result.exit_code == 0, result.output
        assert (tmp_path / "v" / "verify_summary.csv").exists()

    def test_broken_dictionary_fails(self, runner, tmp_path, monkeypatch):
        monkeypatch.setattr(
            verify_module, "linearizable_coefficients", lambda gamma, gamma_dot, mass: CoefficientSet()
        )

        result = runner.invoke(cli, ["verify", "--only", "linearizability", "--quick", "--out", str(tmp_path)])

        assert result.exit_code == 1
        assert "linearizability" in result.output

    def test_output_path_is_a_file(self, runner, tmp_path):
        blocker = tmp_path / "taken"
        blocker.write_text("")

        result = runner.invoke(cli, ["verify", "--only", "functional_correctness", "--out", str(blocker)])

        assert result.exit_code == 2

    def test_unknown_criterion(self, runner):
        result = runner.invoke(cli, ["verify", "--only", "teleportation"])

        assert result.exit_code == 2


def test_history_empty(runner):
    """Test the ledger view with no runs."""
    result = runner.invoke(cli, ["history"])

    assert result.exit_code == 0
    assert "No runs recorded" in result.output


def test_show_config(runner):
    """Test the canonical form is printed."""
    result = runner.invoke(cli, ["show-config", str(CONFIG_DIR / "momentum_cone.toml")])

    assert result.exit_code == 0
    assert 'kind = "momentum_cone"' in result.output
    assert "order_ratio_min" in result.output


def test_show_config_invalid(runner, tmp_path):
    """Test show-config reports config errors."""
    bad = tmp_path / "bad.toml"
    bad.write_text("kind = [")

    result = runner.invoke(cli, ["show-config", str(bad)])

    assert result.exit_code == 2
