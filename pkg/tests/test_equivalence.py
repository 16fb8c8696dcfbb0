import numpy as np
import pytest

from src.gaugelab.core.errors import ConfigurationError, ShapeMismatchError
from src.gaugelab.core.grid import Grid, Region
from src.gaugelab.dynamics.propagator import EvolutionSpec
from src.gaugelab.gauge.equivalence import QuantumSystem, check_topological_equivalence
from src.gaugelab.gauge.schedule import GaugeSchedule
from src.gaugelab.gauge.transforms import IdentityMap, NonlinearGaugeMap, PhaseGaugeMap


@pytest.fixture
def regions():
    return [Region.interval(-3.0, 0.0), Region.interval(0.0, 2.5), Region.interval(1.0, np.inf)]


def test_linear_and_gauged_systems_are_equivalent(gaussian, regions):
    """Test the nonlinear gauge map intertwines both evolutions."""
    schedule = GaugeSchedule.constant(0.4)
    linear = QuantumSystem("linear", EvolutionSpec(grid=gaussian.grid))
    gauged = QuantumSystem("gauged", EvolutionSpec(grid=gaussian.grid, gauge_schedule=schedule))

    report = check_topological_equivalence(
        linear, gauged, NonlinearGaugeMap(schedule), [gaussian], regions, [0.1, 0.2]
    )

    assert report.passed
    assert report.verdict == "pass"
    assert report.sample_count == 5
    assert report.max_position_residual < 1e-12


def test_identity_map_does_not_intertwine(gaussian, regions):
    """Test the same pair fails without the gauge map."""
    schedule = GaugeSchedule.constant(0.4)
    linear = QuantumSystem("linear", EvolutionSpec(grid=gaussian.grid))
    gauged = QuantumSystem("gauged", EvolutionSpec(grid=gaussian.grid, gauge_schedule=schedule))

    report = check_topological_equivalence(linear, gauged, IdentityMap(), [gaussian], regions, [0.2])

    assert not report.passed
    assert report.max_evolution_residual > 1e-3


def test_phase_map_between_free_systems(gaussian, regions):
    """Test a constant phase is a symmetry of every linear system."""
    system = QuantumSystem("free", EvolutionSpec(grid=gaussian.grid))
    phase = PhaseGaugeMap.static(np.full(gaussian.grid.shape, 0.7))

    report = check_topological_equivalence(system, system, phase, [gaussian], regions, [0.1])

    assert report.passed
    assert report.max_evolution_residual < 1e-12


def test_systems_must_share_grid(gaussian, regions):
    """Test mismatched physical spaces."""
    a = QuantumSystem("a", EvolutionSpec(grid=gaussian.grid))
    b = QuantumSystem("b", EvolutionSpec(grid=Grid.line(128, 20.0)))

    with pytest.raises(ShapeMismatchError):
        check_topological_equivalence(a, b, IdentityMap(), [gaussian], regions, [0.1])


def test_sample_sets_must_be_nonempty(gaussian, regions):
    """Test empty state, region or time lists."""
    system = QuantumSystem("free", EvolutionSpec(grid=gaussian.grid))

    with pytest.raises(ConfigurationError):
        check_topological_equivalence(system, system, IdentityMap(), [], regions, [0.1])
    with pytest.raises(ConfigurationError):
        check_topological_equivalence(system, system, IdentityMap(), [gaussian], regions, [])
