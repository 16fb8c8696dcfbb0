import math

import numpy as np
import pytest

from src.gaugelab.core.errors import ConfigurationError, DomainError, ShapeMismatchError
from src.gaugelab.core.grid import Grid, Region, Space


def test_grid_points_are_vertex_centred():
    """Test x_i = -L/2 + i*dx."""
    grid = Grid.line(8, 8.0)

    assert np.allclose(grid.axes[0], [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0])
    assert grid.spacing == (1.0,)
    assert grid.cell_volume == 1.0
    assert math.isclose(grid.momentum_spacing[0], 2.0 * math.pi / 8.0)


@pytest.mark.parametrize("points,lengths", [
    ((12,), (1.0,)),
    ((4,), (1.0,)),
    ((8, 8, 8), (1.0, 1.0, 1.0)),
    ((8,), (0.0,)),
    ((8,), (math.inf,)),
    ((8, 8), (1.0,)),
])
def test_invalid_grids_rejected(points, lengths):
    """Test grid validation."""
    with pytest.raises(ConfigurationError):
        Grid(points, lengths)


def test_plane_and_tensor_grids():
    """Test 2D constructors agree."""
    plane = Grid.plane(16, 4.0)
    tensor = Grid.tensor(Grid.line(16, 4.0), Grid.line(16, 4.0))

    assert plane == tensor
    assert plane.dim == 2
    assert plane.size == 256
    assert plane.k_squared.shape == (16, 16)


def test_k_max_squared_sums_over_axes():
    """Test the Nyquist corner of a 2D grid."""
    grid = Grid.plane(32, 8.0)
    nyquist = math.pi / grid.spacing[0]

    assert math.isclose(grid.k_max_squared, 2.0 * nyquist ** 2)


def test_velocity_cone_grid_length():
    """Test L**2 = 2*pi*N*t/m."""
    grid = Grid.for_velocity_cone(256, 10.0, mass=2.0)

    assert math.isclose(grid.lengths[0] ** 2, 2.0 * math.pi * 256 * 10.0 / 2.0)


def test_velocity_cone_grid_needs_positive_time():
    """Test t <= 0 is rejected."""
    with pytest.raises(DomainError):
        Grid.for_velocity_cone(256, 0.0)


def test_region_mask_is_half_open():
    """Test [lo, hi) cell membership."""
    grid = Grid.line(8, 8.0)
    mask = Region.interval(0.0, 2.0).mask(grid)

    assert list(np.flatnonzero(mask)) == [4, 5]


def test_infinite_bounds():
    """Test regions with infinite bounds."""
    grid = Grid.line(8, 8.0)

    assert Region.interval(-math.inf, 0.0).mask(grid).sum() == 4
    assert Region.whole().mask(grid).all()
    assert not Region.empty().mask(grid).any()


@pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (2.0, 1.0), (math.nan, 1.0)])
def test_invalid_interval_rejected(lo, hi):
    """Test lo < hi is required."""
    with pytest.raises(DomainError):
        Region.interval(lo, hi)


def test_overlapping_members_rejected():
    """Test members of a union must be disjoint."""
    with pytest.raises(DomainError):
        Region.union(Region.interval(0.0, 2.0), Region.interval(1.0, 3.0))


def test_union_of_touching_intervals():
    """Test half-open neighbours are disjoint."""
    grid = Grid.line(8, 8.0)
    region = Region.union(Region.interval(-2.0, 0.0), Region.interval(0.0, 2.0))

    assert region.mask(grid).sum() == 4


def test_union_across_spaces_rejected():
    """Test position and momentum regions do not mix."""
    with pytest.raises(DomainError):
        Region.union(Region.interval(0.0, 1.0), Region.interval(0.0, 1.0, Space.MOMENTUM))


def test_region_dimension_must_match_grid():
    """Test a 1D region on a 2D grid."""
    with pytest.raises(ShapeMismatchError):
        Region.interval(0.0, 1.0).mask(Grid.plane(8, 8.0))


@pytest.mark.parametrize("space", [Space.POSITION, Space.MOMENTUM])
def test_partition_covers_each_cell_once(space):
    """Test full-axis partitions."""
    grid = Grid.line(64, 10.0)
    cells = Region.partition(grid, 8, space=space)
    counts = sum(cell.mask(grid).astype(int) for cell in cells)

    assert len(cells) == 8
    assert np.all(counts == 1)


def test_partition_along_second_axis():
    """Test a partition of one axis of a plane grid."""
    grid = Grid.plane(16, 8.0)
    cells = Region.partition(grid, 4, axis=1)

    assert cells[0].mask(grid)[:, :4].all()
    assert not cells[0].mask(grid)[:, 4:].any()


def test_momentum_mask_uses_fft_order():
    """Test momentum cells are matched against FFT-ordered wavenumbers."""
    grid = Grid.line(16, 2.0 * math.pi)
    mask = Region.interval(0.5, 2.5, Space.MOMENTUM).mask(grid)

    assert list(np.flatnonzero(mask)) == [1, 2]


def test_scaled_region():
    """Test scaling bounds and switching space."""
    region = Region.interval(-1.0, 2.0, Space.MOMENTUM).scaled(3.0, Space.POSITION)

    assert region.boxes == (((-3.0, 6.0),),)
    assert region.space is Space.POSITION

    with pytest.raises(DomainError):
        region.scaled(0.0)


def test_clipped_region_reports_cut():
    """Test clipping to the box."""
    grid = Grid.line(8, 8.0)

    clipped, cut = Region.interval(2.0, 10.0).clipped(grid)
    assert cut
    assert clipped.boxes == (((2.0, 4.0),),)

    _, cut = Region.interval(-math.inf, 0.0).clipped(grid)
    assert not cut


def test_describe():
    """Test region and grid descriptions."""
    assert Region.interval(0.0, 1.0).describe() == "position:[0,1)"
    assert Region.empty(Space.MOMENTUM).describe() == "momentum:empty"
    assert Grid.line(8, 8.0).describe() == "Grid(8@8)"
