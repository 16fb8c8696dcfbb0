import math

import numpy as np
import pytest

from src.gaugelab.core.errors import DegenerateStateError
from src.gaugelab.core.grid import Region
from src.gaugelab.core.wavefunction import Wavefunction, born_probability
from src.gaugelab.dynamics.propagator import EvolutionSpec, free_propagate
from src.gaugelab.gauge.histories import history_probability
from src.gaugelab.gauge.transforms import IdentityProjection, RegionProjection


@pytest.fixture
def free_spec(line_grid):
    return EvolutionSpec(grid=line_grid, dt=1e-3)


def test_identity_history_is_certain(gaussian, free_spec):
    """Test identity projections keep the whole norm."""
    steps = [(0.1, IdentityProjection()), (0.2, IdentityProjection())]

    assert math.isclose(history_probability(gaussian, free_spec, steps, 0.6), 1.0, rel_tol=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 0.5, -1.2])
def test_single_position_step_is_born_rule(random_state, free_spec, gamma):
    """Test a position projection without evolution gives p_B for any gamma."""
    region = Region.interval(-1.0, 2.0)

    probability = history_probability(random_state, free_spec, [(0.0, RegionProjection(region))], gamma)

    assert math.isclose(probability, born_probability(random_state, region), rel_tol=1e-12)


def test_linear_history_after_evolution(gaussian, free_spec):
    """Test evolve-then-project against the evolved Born probability."""
    region = Region.interval(0.0, 3.0)
    evolved = free_propagate(gaussian, 1.0, 0.3)

    probability = history_probability(gaussian, free_spec, [(0.3, RegionProjection(region))], 0.0)

    assert math.isclose(probability, born_probability(evolved, region), rel_tol=1e-9)


def test_repeated_projection_changes_nothing(random_state, free_spec):
    """Test idempotency inside a history."""
    projection = RegionProjection(Region.interval(-2.0, 1.0))

    once = history_probability(random_state, free_spec, [(0.0, projection)], 0.7)
    twice = history_probability(random_state, free_spec, [(0.0, projection), (0.0, projection)], 0.7)

    assert math.isclose(once, twice, rel_tol=1e-10)


def test_annihilated_history(gaussian, free_spec):
    """Test disjoint projections give probability zero."""
    steps = [
        (0.0, RegionProjection(Region.interval(-5.0, 0.0))),
        (0.0, RegionProjection(Region.interval(0.0, 5.0))),
    ]

    assert history_probability(gaussian, free_spec, steps, 0.4) == 0.0


def test_zero_state(line_grid, free_spec):
    """Test histories of the zero state are undefined."""
    with pytest.raises(DegenerateStateError):
        history_probability(Wavefunction(line_grid, np.zeros(line_grid.shape)), free_spec, [], 0.0)
