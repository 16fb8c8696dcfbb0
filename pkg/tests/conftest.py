"""Pytest configuration and fixtures."""
import numpy as np
import pytest

from src.gaugelab.config import config
from src.gaugelab.core.grid import Grid
from src.gaugelab.core.wavefunction import Wavefunction
from src.gaugelab.experiments.builders import gaussian_values


@pytest.fixture(autouse=True)
def isolated_ledger(tmp_path, monkeypatch):
    """Keep CLI runs from writing to the working directory's ledger."""
    monkeypatch.setattr(config, "RECORD_RUNS", False)
    monkeypatch.setattr(config, "DB_PATH", str(tmp_path / "ledger.db"))
    monkeypatch.setattr(config, "OUTPUT_DIR", str(tmp_path / "results"))


@pytest.fixture
def line_grid():
    return Grid.line(256, 20.0)


@pytest.fixture
def gaussian(line_grid):
    """Normalized moving Gaussian centred at -1."""
    values = gaussian_values(line_grid.axes[0], -1.0, 1.0, carrier=1.0)
    return Wavefunction(line_grid, values).normalized()


@pytest.fixture
def random_state(line_grid):
    """Smooth nodeless-in-practice random state with a fixed seed."""
    rng = np.random.default_rng(3)
    k = line_grid.wavenumbers[0]
    spectrum = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) * np.exp(-0.5 * (k / 2.0) ** 2)
    x = line_grid.axes[0]
    values = np.fft.ifft(spectrum) * np.exp(-0.5 * (x / 3.0) ** 2)
    return Wavefunction(line_grid, values).normalized()


@pytest.fixture
def plane_grid():
    return Grid.plane(32, 16.0)
