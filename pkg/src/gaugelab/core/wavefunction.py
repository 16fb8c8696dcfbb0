"""Wavefunction storage, densities, currents and the Born rule."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import DegenerateStateError, DomainError, InvalidStateError, ShapeMismatchError
from .grid import Grid, Region, Space
from .spectral import gradient

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex field on a periodic grid at a given time."""
    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ShapeMismatchError(
                f"values of shape {values.shape} do not fit {self.grid.describe()}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time", float(self.time))

    @classmethod
    def from_function(
        cls,
        grid: Grid,
        fn: Callable[..., np.ndarray],
        time: float = 0.0,
    ) -> "Wavefunction":
        """Sample fn(x) or fn(x1, x2) on the grid points."""
        return cls(grid, fn(*grid.coordinates()), time)

    @property
    def cell_volume(self) -> float:
        return self.grid.cell_volume

    def with_values(self, values: np.ndarray, time: Optional[float] = None) -> "Wavefunction":
        return Wavefunction(self.grid, values, self.time if time is None else time)

    def scaled(self, factor: complex) -> "Wavefunction":
        return self.with_values(self.values * factor)

    def normalized(self) -> "Wavefunction":
        return self.scaled(1.0 / norm(self))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


@dataclass(frozen=True, eq=False)
class MomentumWavefunction:
    """Fourier representation, values stored in FFT order."""
    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise ShapeMismatchError("momentum values do not fit the grid")
        object.__setattr__(self, "values", values)

    @property
    def cell_volume(self) -> float:
        return self.grid.momentum_cell_volume


@dataclass(frozen=True, eq=False)
class DensityField:
    grid: Grid
    values: np.ndarray

    def total(self) -> float:
        return float(np.sum(self.values) * self.grid.cell_volume)


@dataclass(frozen=True, eq=False)
class CurrentField:
    """Current J = Im(conj(psi) grad psi), components stacked on axis 0."""
    grid: Grid
    values: np.ndarray

    def component(self, axis: int) -> np.ndarray:
        return self.values[axis]


AnyWavefunction = Union[Wavefunction, MomentumWavefunction]


def require_finite(psi: AnyWavefunction):
    if not np.all(np.isfinite(psi.values)):
        raise InvalidStateError("wavefunction contains NaN or Inf values")


def require_same_grid(first, second):
    if first.grid != second.grid:
        raise ShapeMismatchError(
            f"{first.grid.describe()} does not match {second.grid.describe()}"
        )


def density(psi: Wavefunction) -> DensityField:
    require_finite(psi)
    return DensityField(psi.grid, np.abs(psi.values) ** 2)


def current(psi: Wavefunction) -> CurrentField:
    require_finite(psi)
    conj = np.conj(psi.values)
    components = [np.imag(conj * d) for d in gradient(psi.values, psi.grid)]
    return CurrentField(psi.grid, np.stack(components))


def squared_norm(psi: AnyWavefunction) -> float:
    return float(np.sum(np.abs(psi.values) ** 2) * psi.cell_volume)


def norm(psi: AnyWavefunction) -> float:
    require_finite(psi)
    return math.sqrt(squared_norm(psi))


def inner(phi: AnyWavefunction, psi: AnyWavefunction) -> complex:
    """<phi|psi>, antilinear in the first argument."""
    if type(phi) is not type(psi):
        raise ShapeMismatchError("inner product across position and momentum representations")
    require_same_grid(phi, psi)
    return complex(np.vdot(phi.values, psi.values) * psi.cell_volume)


def mask_probability(values: np.ndarray, mask: np.ndarray) -> float:
    """Share of |values|^2 inside a cell mask."""
    weights = np.abs(values) ** 2
    total = float(np.sum(weights))
    if total == 0.0:
        raise DegenerateStateError("probability of a zero-norm state is undefined")
    inside = float(np.sum(weights[mask]))
    return min(max(inside / total, 0.0), 1.0)


def born_probability(psi: Wavefunction, region: Region) -> float:
    """p_B[psi] = ||E(B) psi||^2 / ||psi||^2 for a position region."""
    if region.space is not Space.POSITION:
        raise DomainError("born_probability needs a position-space region")
    require_finite(psi)
    return mask_probability(psi.values, region.mask(psi.grid))


def _phase_factors(grid: Grid) -> Tuple[np.ndarray, ...]:
    factors = []
    for axis, (k, length) in enumerate(zip(grid.wavenumbers, grid.lengths)):
        shape = [1] * grid.dim
        shape[axis] = k.size
        factors.append(np.exp(1j * k * length / 2.0).reshape(shape))
    return tuple(factors)


def fourier(psi: Wavefunction) -> MomentumWavefunction:
    """Continuum-normalized transform, Parseval exact on the grid."""
    require_finite(psi)
    grid = psi.grid
    scale = float(np.prod([dx / math.sqrt(2.0 * math.pi) for dx in grid.spacing]))
    values = np.fft.fftn(psi.values) * scale
    for factor in _phase_factors(grid):
        values = values * factor
    return MomentumWavefunction(grid, values, psi.time)


def inverse_fourier(psi_hat: MomentumWavefunction) -> Wavefunction:
    grid = psi_hat.grid
    scale = float(np.prod([dx / math.sqrt(2.0 * math.pi) for dx in grid.spacing]))
    values = psi_hat.values
    for factor in _phase_factors(grid):
        values = values * np.conj(factor)
    return Wavefunction(grid, np.fft.ifftn(values) / scale, psi_hat.time)
