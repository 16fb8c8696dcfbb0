"""Grid geometry, wavefunctions and the spectral derivative contract."""
from .errors import (
    LabError,
    InvalidStateError,
    DegenerateStateError,
    ShapeMismatchError,
    InvalidProjectionError,
    ConfigurationError,
    StabilityError,
    DomainError,
    BoxTooSmallError,
    CapacityError,
    BlowupError,
)
from .grid import Grid, Region, Space
from .spectral import gradient, laplacian, divergence, finite_difference_gradient
from .wavefunction import (
    Wavefunction,
    MomentumWavefunction,
    DensityField,
    CurrentField,
    density,
    current,
    born_probability,
    inner,
    norm,
    fourier,
    inverse_fourier,
)

__all__ = [
    'LabError',
    'InvalidStateError',
    'DegenerateStateError',
    'ShapeMismatchError',
    'InvalidProjectionError',
    'ConfigurationError',
    'StabilityError',
    'DomainError',
    'BoxTooSmallError',
    'CapacityError',
    'BlowupError',
    'Grid',
    'Region',
    'Space',
    'gradient',
    'laplacian',
    'divergence',
    'finite_difference_gradient',
    'Wavefunction',
    'MomentumWavefunction',
    'DensityField',
    'CurrentField',
    'density',
    'current',
    'born_probability',
    'inner',
    'norm',
    'fourier',
    'inverse_fourier',
]
