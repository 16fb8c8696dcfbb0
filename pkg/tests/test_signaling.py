import math

import numpy as np
import pytest

from src.gaugelab.config import config
from src.gaugelab.core.errors import ConfigurationError, DomainError
from src.gaugelab.core.grid import Grid, Region
from src.gaugelab.core.wavefunction import Wavefunction
from src.gaugelab.dynamics.coefficients import CoefficientSet
from src.gaugelab.dynamics.propagator import BlowupTrigger
from src.gaugelab.experiments.builders import gaussian_values
from src.gaugelab.observables.signaling import (
    TwoParticleSpec,
    factorization_residual,
    gisin_experiment,
    is_entangled,
    marginal_probability,
    product_factors,
    schmidt_coefficients,
)

REGIONS = [Region.interval(-math.inf, 0.0), Region.interval(0.0, math.inf), Region.interval(-3.0, -1.0)]


@pytest.fixture
def pair_grid():
    return Grid.plane(64, 16.0)


def _state(grid, entangled):
    x1, x2 = grid.coordinates()
    values = gaussian_values(x1, -2.0, 1.0, 0.5) * gaussian_values(x2, 2.0, 1.0, -0.5)
    if entangled:
        values = values + gaussian_values(x1, 2.0, 1.0, -0.5) * gaussian_values(x2, -2.0, 1.0, 0.5)
    return Wavefunction(grid, values).normalized()


def _spec(grid, entangled, coefficients=None):
    zeros = np.zeros(grid.points[0])
    return TwoParticleSpec(
        grid=grid,
        potential_1=zeros,
        potential_2=zeros,
        initial=_state(grid, entangled),
        coefficients=coefficients or CoefficientSet(),
        dt=1e-3,
    )


def _remotes(grid):
    x = grid.axes[1]
    return [0.125 * x ** 2, 0.3 * x]


def test_schmidt_coefficients(pair_grid):
    """Test product and entangled states."""
    product = schmidt_coefficients(_state(pair_grid, False))
    entangled = schmidt_coefficients(_state(pair_grid, True))

    assert math.isclose(product[0], 1.0, rel_tol=1e-12)
    assert math.isclose(entangled.sum(), 1.0)
    assert entangled[0] < 0.6
    assert not is_entangled(_state(pair_grid, False))
    assert is_entangled(_state(pair_grid, True))


def test_schmidt_needs_two_particles(gaussian):
    """Test 1D states are refused."""
    with pytest.raises(ConfigurationError):
        schmidt_coefficients(gaussian)


def test_marginal_probability(pair_grid):
    """Test one-particle marginals."""
    psi = _state(pair_grid, False)

    assert math.isclose(marginal_probability(psi, Region.whole()), 1.0)
    assert marginal_probability(psi, Region.interval(-math.inf, 0.0)) > 0.95
    assert marginal_probability(psi, Region.interval(-math.inf, 0.0), particle=1) < 0.05


def test_product_factors_rebuild_state(pair_grid):
    """Test rank-one factors of a product state."""
    psi = _state(pair_grid, False)
    first, second = product_factors(psi)

    assert np.max(np.abs(np.outer(first.values, second.values) - psi.values)) < 1e-12


def test_spec_needs_tensor_grid(line_grid, gaussian):
    """Test two-particle specs live on 2D grids."""
    with pytest.raises(ConfigurationError):
        TwoParticleSpec(line_grid, np.zeros(256), np.zeros(256), gaussian)


def test_combined_potential(pair_grid):
    """Test V(x1, x2) = V1(x1) + V2(x2)."""
    x = pair_grid.axes[0]
    spec = _spec(pair_grid, False)
    spec = TwoParticleSpec(pair_grid, x, x ** 2, spec.initial)

    potential = spec.potential()

    assert potential.shape == (64, 64)
    assert potential[3, 5] == x[3] + x[5] ** 2


def test_linear_dynamics_does_not_signal(pair_grid):
    """Test remote potentials leave particle-1 marginals unchanged."""
    report = gisin_experiment(_spec(pair_grid, True), _remotes(pair_grid), 0.5, REGIONS)

    assert report.entangled
    assert report.variant_count == 3
    assert report.region_count == 3
    assert report.statistic <= 1e-10
    assert not report.signals(1e-10)


def test_nonlinear_product_state_does_not_signal(pair_grid):
    """Test product states stay product under the local nonlinearity."""
    spec = _spec(pair_grid, False, CoefficientSet(mu2=0.1))

    report = gisin_experiment(spec, _remotes(pair_grid), 0.5, REGIONS)

    assert not report.entangled
    assert report.statistic <= 1e-6
    assert factorization_residual(spec, 0.5) <= 1e-4


def test_nonlinear_entangled_state_is_measured(pair_grid):
    """Test the entangled nonlinear run produces a finite statistic."""
    report = gisin_experiment(_spec(pair_grid, True, CoefficientSet(mu2=0.1)), _remotes(pair_grid), 0.5, REGIONS)

    assert not report.blew_up
    assert math.isfinite(report.statistic)
    assert len(report.probabilities) == 3


def test_factorization_needs_product_state(pair_grid):
    """Test entangled states have no factors."""
    with pytest.raises(ConfigurationError):
        factorization_residual(_spec(pair_grid, True), 0.1)


def test_signaling_arguments(pair_grid):
    """Test t > 0 and a nonempty region list."""
    spec = _spec(pair_grid, True)

    with pytest.raises(DomainError):
        gisin_experiment(spec, _remotes(pair_grid), 0.0, REGIONS)
    with pytest.raises(ConfigurationError):
        gisin_experiment(spec, _remotes(pair_grid), 0.1, [])


def test_blowup_is_embedded_in_report(pair_grid, monkeypatch):
    """Test a blown-up variant ends the experiment with a diagnostic."""
    monkeypatch.setattr(config, "BLOWUP_AMPLITUDE", 1e-6)

    report = gisin_experiment(_spec(pair_grid, True, CoefficientSet(mu2=0.1)), _remotes(pair_grid), 0.1, REGIONS)

    assert report.blew_up
    assert report.blowup.trigger is BlowupTrigger.OVERFLOW
    assert math.isnan(report.statistic)
    assert not report.signals(1e-10)
