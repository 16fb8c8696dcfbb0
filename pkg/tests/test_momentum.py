import math

import numpy as np
import pytest

from src.gaugelab.core.errors import BoxTooSmallError, DomainError
from src.gaugelab.core.grid import Grid, Region, Space
from src.gaugelab.core.wavefunction import Wavefunction
from src.gaugelab.experiments.builders import gaussian_values
from src.gaugelab.observables.momentum import (
    asymptotic_momentum_probability,
    clipping_fraction,
    fourier_momentum_probability,
    momentum_observable,
    velocity_cone,
)

TIMES = [10.0, 20.0, 30.0, 40.0, 50.0]


@pytest.fixture
def cone_grid():
    return Grid.for_velocity_cone(512, TIMES[-1])


def _packet(grid, carrier):
    return Wavefunction(grid, gaussian_values(grid.axes[0], 0.0, 1.5, carrier)).normalized()


def test_velocity_cone_scales_region():
    """Test B_t = (t/m) B in position space."""
    cone = velocity_cone(Region.interval(-1.0, 2.0, Space.MOMENTUM), 4.0, mass=2.0)

    assert cone.space is Space.POSITION
    assert cone.boxes == (((-2.0, 4.0),),)


@pytest.mark.parametrize("t,mass", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
def test_velocity_cone_domain(t, mass):
    """Test t > 0 and m > 0."""
    with pytest.raises(DomainError):
        velocity_cone(Region.interval(0.0, 1.0, Space.MOMENTUM), t, mass)


def test_velocity_cone_needs_momentum_region():
    """Test position regions are rejected."""
    with pytest.raises(DomainError):
        velocity_cone(Region.interval(0.0, 1.0), 1.0)


def test_velocity_cone_clipping_warns(caplog):
    """Test clipping to the box is logged."""
    grid = Grid.line(64, 10.0)

    cone = velocity_cone(Region.interval(0.0, 2.0, Space.MOMENTUM), 5.0, grid=grid)

    assert cone.boxes == (((0.0, 5.0),),)
    assert "clipped" in caplog.text


@pytest.mark.parametrize("carrier", [0.0, 1.0, -0.8])
@pytest.mark.parametrize("lo,hi", [(-math.inf, 0.0), (0.0, 1.0), (-1.0, 0.5)])
def test_cone_probabilities_approach_fourier_values(cone_grid, carrier, lo, hi):
    """Test the positional estimate converges to the momentum measure."""
    psi = _packet(cone_grid, carrier)
    region = Region.interval(lo, hi, Space.MOMENTUM)

    result = asymptotic_momentum_probability(psi, region, 1.0, TIMES)
    reference = fourier_momentum_probability(psi, region)
    deviations = result.deviations(reference)

    assert deviations[-1] <= 2e-3
    assert deviations[-1] <= deviations[0] + 1e-12
    assert result.estimate == result.probabilities[-1]


def test_partition_cones_cover_box(cone_grid):
    """Test cone images of a momentum partition sum to one."""
    psi = _packet(cone_grid, 0.5)
    partition = Region.partition(cone_grid, 8, space=Space.MOMENTUM)

    probabilities = momentum_observable(psi, partition, 1.0, TIMES[-1])

    assert math.isclose(sum(probabilities), 1.0, rel_tol=1e-12)


def test_box_too_small():
    """Test fast packets leaving the box are refused."""
    grid = Grid.line(256, 20.0)
    psi = _packet(grid, 2.0)

    assert clipping_fraction(psi, 1.0, 50.0) > 0.5
    with pytest.raises(BoxTooSmallError, match="enlarge the box"):
        asymptotic_momentum_probability(psi, Region.interval(0.0, 1.0, Space.MOMENTUM), 1.0, [50.0])


def test_clipping_follows_the_centroid():
    """Test an off-centre packet is refused although its speed alone fits the box."""
    grid = Grid.line(1024, 80.0)
    centred = Wavefunction(grid, gaussian_values(grid.axes[0], 0.0, 3.0, 0.2)).normalized()
    shifted = Wavefunction(grid, gaussian_values(grid.axes[0], 20.0, 3.0, 0.2)).normalized()
    region = Region.interval(0.0, 1.0, Space.MOMENTUM)

    assert clipping_fraction(centred, 1.0, 40.0) < 1e-3
    assert clipping_fraction(shifted, 1.0, 40.0) > 0.05
    with pytest.raises(BoxTooSmallError):
        asymptotic_momentum_probability(shifted, region, 1.0, [40.0])


@pytest.mark.parametrize("times", [[], [0.0, 1.0], [2.0, 1.0]])
def test_times_must_increase(cone_grid, times):
    """Test the time list is validated."""
    psi = _packet(cone_grid, 0.0)

    with pytest.raises(DomainError):
        asymptotic_momentum_probability(psi, Region.interval(0.0, 1.0, Space.MOMENTUM), 1.0, times)


def test_fourier_probability(cone_grid):
    """Test the Fourier measure of a symmetric packet."""
    psi = _packet(cone_grid, 0.0)

    assert math.isclose(fourier_momentum_probability(psi, Region.whole(space=Space.MOMENTUM)), 1.0)
    assert math.isclose(
        fourier_momentum_probability(psi, Region.interval(-math.inf, 0.0, Space.MOMENTUM)),
        0.5,
        abs_tol=0.02,
    )
    with pytest.raises(DomainError):
        fourier_momentum_probability(psi, Region.interval(0.0, 1.0))
