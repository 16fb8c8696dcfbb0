"""Momentum as an asymptotic positional measurement."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..core.errors import BoxTooSmallError, DomainError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, born_probability, fourier, mask_probability, require_finite
from ..dynamics.propagator import centroid, free_propagate

logger = logging.getLogger(__name__)

CLIPPING_LIMIT = 1e-3


def velocity_cone(
    region: Region,
    t: float,
    mass: float = 1.0,
    grid: Optional[Grid] = None,
) -> Region:
    """
    B_t = {(t/m) p : p in B}, a position region.

    With a grid the cone is clipped to the box and a warning is logged when
    a finite part of it falls outside.
    """
    if t <= 0:
        raise DomainError(f"velocity cone needs t > 0, got {t}")
    if mass <= 0:
        raise DomainError(f"velocity cone needs mass > 0, got {mass}")
    if region.space is not Space.MOMENTUM:
        raise DomainError("velocity cones are built from momentum-space regions")
    cone = region.scaled(t / mass, Space.POSITION)
    if grid is not None:
        cone, cut = cone.clipped(grid)
        if cut:
            logger.warning(f"Velocity cone {cone.describe()} at t={t:g} clipped to the box")
    return cone


def clipping_fraction(psi: Wavefunction, mass: float, t: float) -> float:
    """
    Fourier mass whose image x_c + (t/m) k at time t lies outside the box,
    with x_c the density centroid.
    """
    require_finite(psi)
    weights = np.abs(np.fft.fftn(psi.values)) ** 2
    total = float(np.sum(weights))
    if total == 0:
        return 0.0
    outside = np.zeros(psi.grid.shape, dtype=bool)
    meshes = np.meshgrid(*psi.grid.wavenumbers, indexing="ij")
    for axis, (k, x, length) in enumerate(zip(meshes, psi.grid.axes, psi.grid.lengths)):
        image = centroid(psi, axis) + k * t / mass
        outside |= (image < x[0]) | (image >= x[0] + length)
    return float(np.sum(weights[outside])) / total


@dataclass
class AsymptoticMomentumResult:
    times: List[float]
    probabilities: List[float]
    clipping_fraction: float
    monotone: bool = field(default=False)

    @property
    def estimate(self) -> float:
        return self.probabilities[-1]

    def deviations(self, reference: float) -> List[float]:
        return [abs(p - reference) for p in self.probabilities]

    def approaches(self, reference: float, transient: int = 0) -> bool:
        """Deviation from reference is non-increasing after the transient."""
        tail = self.deviations(reference)[transient:]
        return all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))


def asymptotic_momentum_probability(
    psi: Wavefunction,
    region: Region,
    mass: float,
    t_list: Sequence[float],
) -> AsymptoticMomentumResult:
    """
    Sequence p_{B_t}[free_propagate(psi, t)] over increasing t.

    Raises:
        BoxTooSmallError: If more than CLIPPING_LIMIT of the Fourier mass
            would leave the box by max(t_list)
    """
    times = [float(t) for t in t_list]
    if not times:
        raise DomainError("asymptotic momentum needs at least one time")
    if any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise DomainError("times must be positive and strictly increasing")

    clipped = clipping_fraction(psi, mass, times[-1])
    if clipped >= CLIPPING_LIMIT:
        raise BoxTooSmallError(
            f"{clipped:.2e} of the Fourier mass leaves the box by t={times[-1]:g}; enlarge the box"
        )

    probabilities = []
    for t in times:
        evolved = free_propagate(psi, mass, t)
        probabilities.append(born_probability(evolved, velocity_cone(region, t, mass)))

    steps = np.diff(probabilities)
    monotone = bool(np.all(steps >= -1e-12) or np.all(steps <= 1e-12))
    logger.debug(f"Cone probabilities for {region.describe()}: {probabilities}")
    return AsymptoticMomentumResult(times, probabilities, clipped, monotone)


def fourier_momentum_probability(psi: Wavefunction, region: Region) -> float:
    """Integral of |psi_hat|^2 over a momentum region, normalized."""
    if region.space is not Space.MOMENTUM:
        raise DomainError("fourier_momentum_probability needs a momentum-space region")
    transformed = fourier(psi)
    return mask_probability(transformed.values, region.mask(psi.grid))


def momentum_observable(
    psi: Wavefunction,
    partition: Sequence[Region],
    mass: float,
    t: float,
) -> List[float]:
    """Cone probabilities of a momentum partition at one time."""
    evolved = free_propagate(psi, mass, t)
    return [born_probability(evolved, velocity_cone(region, t, mass)) for region in partition]
