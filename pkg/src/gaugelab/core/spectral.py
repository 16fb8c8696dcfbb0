"""Spectral derivatives on periodic grids.

First derivatives zero the Nyquist mode so that real fields keep real
derivatives; second derivatives keep it.
"""
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ShapeMismatchError
from .grid import Grid


@lru_cache(maxsize=32)
def _first_derivative_multipliers(grid: Grid) -> Tuple[np.ndarray, ...]:
    multipliers = []
    for axis, (n, k) in enumerate(zip(grid.points, grid.wavenumbers)):
        ik = 1j * k.copy()
        ik[n // 2] = 0.0
        shape = [1] * grid.dim
        shape[axis] = n
        multipliers.append(ik.reshape(shape))
    return tuple(multipliers)


def _check_shape(values: np.ndarray, grid: Grid):
    if values.shape != grid.shape:
        raise ShapeMismatchError(f"field shape {values.shape} does not match grid {grid.shape}")


def _restore_dtype(result: np.ndarray, real_input: bool) -> np.ndarray:
    return result.real if real_input else result


def gradient(values: np.ndarray, grid: Grid) -> List[np.ndarray]:
    """Spectral gradient, one array per axis."""
    _check_shape(values, grid)
    real_input = np.isrealobj(values)
    transformed = np.fft.fftn(values)
    return [
        _restore_dtype(np.fft.ifftn(ik * transformed), real_input)
        for ik in _first_derivative_multipliers(grid)
    ]


def laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    _check_shape(values, grid)
    result = np.fft.ifftn(-grid.k_squared * np.fft.fftn(values))
    return _restore_dtype(result, np.isrealobj(values))


def divergence(components: Sequence[np.ndarray], grid: Grid) -> np.ndarray:
    if len(components) != grid.dim:
        raise ShapeMismatchError(f"{len(components)} components on a {grid.dim}D grid")
    multipliers = _first_derivative_multipliers(grid)
    real_input = all(np.isrealobj(c) for c in components)
    total = np.zeros(grid.shape, dtype=complex)
    for ik, component in zip(multipliers, components):
        _check_shape(component, grid)
        total += ik * np.fft.fftn(component)
    return _restore_dtype(np.fft.ifftn(total), real_input)


def finite_difference_gradient(values: np.ndarray, grid: Grid, axis: int = 0) -> np.ndarray:
    """Fourth-order periodic central difference along one axis."""
    _check_shape(values, grid)
    dx = grid.spacing[axis]
    plus1 = np.roll(values, -1, axis=axis)
    minus1 = np.roll(values, 1, axis=axis)
    plus2 = np.roll(values, -2, axis=axis)
    minus2 = np.roll(values, 2, axis=axis)
    return (-plus2 + 8.0 * plus1 - 8.0 * minus1 + minus2) / (12.0 * dx)
