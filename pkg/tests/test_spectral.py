import numpy as np
import pytest

from src.gaugelab.core.errors import ShapeMismatchError
from src.gaugelab.core.grid import Grid
from src.gaugelab.core.spectral import divergence, finite_difference_gradient, gradient, laplacian


@pytest.fixture
def periodic():
    grid = Grid.line(64, 2.0 * np.pi)
    return grid, grid.axes[0]


def test_gradient_of_resolved_mode(periodic):
    """Test d/dx sin(3x) = 3 cos(3x) to machine precision."""
    grid, x = periodic
    (derivative,) = gradient(np.sin(3 * x), grid)

    assert np.isrealobj(derivative)
    assert np.max(np.abs(derivative - 3 * np.cos(3 * x))) < 1e-12


def test_gradient_of_complex_field(periodic):
    """Test d/dx exp(2ix) = 2i exp(2ix)."""
    grid, x = periodic
    (derivative,) = gradient(np.exp(2j * x), grid)

    assert np.max(np.abs(derivative - 2j * np.exp(2j * x))) < 1e-12


def test_laplacian(periodic):
    """Test lap cos(4x) = -16 cos(4x)."""
    grid, x = periodic

    assert np.max(np.abs(laplacian(np.cos(4 * x), grid) + 16 * np.cos(4 * x))) < 1e-10


def test_divergence_in_two_dimensions():
    """Test div (sin x, cos y) = cos x - sin y."""
    grid = Grid.plane(32, 2.0 * np.pi)
    x, y = grid.coordinates()
    result = divergence([np.sin(x), np.cos(y)], grid)

    assert np.max(np.abs(result - (np.cos(x) - np.sin(y)))) < 1e-12


def test_divergence_component_count():
    """Test one component per axis is required."""
    grid = Grid.plane(8, 1.0)

    with pytest.raises(ShapeMismatchError):
        divergence([np.zeros(grid.shape)], grid)


def test_finite_difference_is_fourth_order(periodic):
    """Test the central difference against the exact derivative."""
    grid, x = periodic
    derivative = finite_difference_gradient(np.sin(x), grid)

    assert np.max(np.abs(derivative - np.cos(x))) < 1e-4


def test_shape_mismatch(periodic):
    """Test fields must match the grid."""
    grid, _ = periodic

    with pytest.raises(ShapeMismatchError):
        gradient(np.zeros(32), grid)
    with pytest.raises(ShapeMismatchError):
        laplacian(np.zeros(32), grid)
