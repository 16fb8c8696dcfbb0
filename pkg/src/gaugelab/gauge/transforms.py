"""Nonlinear gauge maps, linear phase maps and generalized projections."""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from ..core.errors import DegenerateStateError, InvalidProjectionError, ShapeMismatchError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, require_finite
from ..functionals.fields import NodeFloorPolicy
from .schedule import GaugeSchedule

logger = logging.getLogger(__name__)


def gauge_values(values: np.ndarray, gamma: float, policy: NodeFloorPolicy) -> np.ndarray:
    """psi * exp(i gamma ln|psi|) with |psi| = sqrt(rho_eff)."""
    rho_eff = policy.effective_density(np.abs(values) ** 2)
    return values * np.exp(0.5j * gamma * np.log(rho_eff))


def _require_nonzero(psi: Wavefunction):
    require_finite(psi)
    if not np.any(psi.values):
        raise DegenerateStateError("gauge maps need a state of nonzero norm")


def apply_gauge(
    psi: Wavefunction,
    gamma: float,
    policy: Optional[NodeFloorPolicy] = None,
) -> Wavefunction:
    """
    Nonlinear gauge transformation N_gamma.

    Only the phase changes, so every positional probability is preserved.
    """
    _require_nonzero(psi)
    if gamma == 0:
        return psi.with_values(psi.values.copy())
    return psi.with_values(gauge_values(psi.values, gamma, policy or NodeFloorPolicy()))


def invert_gauge(
    psi: Wavefunction,
    gamma: float,
    policy: Optional[NodeFloorPolicy] = None,
) -> Wavefunction:
    """Inverse of N_gamma, which is N_(-gamma)."""
    return apply_gauge(psi, -gamma, policy)


class ProjectionSpec(ABC):
    """Orthogonal projection realized as a 0/1 multiplier in position or momentum space."""

    @abstractmethod
    def apply(self, values: np.ndarray, grid: Grid) -> np.ndarray:
        pass

    def describe(self) -> str:
        return type(self).__name__


class IdentityProjection(ProjectionSpec):
    def apply(self, values: np.ndarray, grid: Grid) -> np.ndarray:
        return values.copy()

    def describe(self) -> str:
        return "identity"


def _apply_multiplier(values: np.ndarray, multiplier: np.ndarray, space: Space) -> np.ndarray:
    if space is Space.POSITION:
        return values * multiplier
    return np.fft.ifftn(multiplier * np.fft.fftn(values))


@dataclass(frozen=True)
class RegionProjection(ProjectionSpec):
    """Indicator of a region; a momentum region gives a band limit."""
    region: Region

    def apply(self, values: np.ndarray, grid: Grid) -> np.ndarray:
        return _apply_multiplier(values, self.region.mask(grid), self.region.space)

    def describe(self) -> str:
        return f"region {self.region.describe()}"


def band_limit(lo: float, hi: float) -> RegionProjection:
    return RegionProjection(Region.interval(lo, hi, Space.MOMENTUM))


@dataclass(frozen=True, eq=False)
class MaskProjection(ProjectionSpec):
    """
    Explicit multiplier array. Entries must be 0 or 1, otherwise the
    operator is not idempotent.
    """
    multiplier: np.ndarray
    space: Space = Space.POSITION

    def __post_init__(self):
        multiplier = np.asarray(self.multiplier, dtype=float)
        if not np.all((multiplier == 0.0) | (multiplier == 1.0)):
            raise InvalidProjectionError("projection multiplier must contain only 0 and 1")
        object.__setattr__(self, "multiplier", multiplier)

    def apply(self, values: np.ndarray, grid: Grid) -> np.ndarray:
        if self.multiplier.shape != grid.shape:
            raise ShapeMismatchError(
                f"projection of shape {self.multiplier.shape} on grid {grid.shape}"
            )
        return _apply_multiplier(values, self.multiplier, self.space)

    def describe(self) -> str:
        return f"mask({int(self.multiplier.sum())} cells, {self.space.value})"


def generalized_projection(
    psi: Wavefunction,
    projection: ProjectionSpec,
    gamma: float,
    policy: Optional[NodeFloorPolicy] = None,
) -> Wavefunction:
    """
    E = N_gamma . E_hat . N_gamma^-1 applied to psi.

    At gamma = 0 this is exactly E_hat psi. A projection that annihilates
    the state returns the zero state.
    """
    require_finite(psi)
    policy = policy or NodeFloorPolicy()
    if gamma == 0:
        return psi.with_values(projection.apply(psi.values, psi.grid))

    _require_nonzero(psi)
    unwrapped = gauge_values(psi.values, -gamma, policy)
    projected = projection.apply(unwrapped, psi.grid)
    if not np.any(projected):
        return psi.with_values(projected)
    return psi.with_values(gauge_values(projected, gamma, policy))


class GaugeMap(ABC):
    """Automorphism of the state space, possibly time dependent."""

    @abstractmethod
    def forward(self, psi: Wavefunction, t: float) -> Wavefunction:
        pass

    @abstractmethod
    def inverse(self, psi: Wavefunction, t: float) -> Wavefunction:
        pass

    def describe(self) -> str:
        return type(self).__name__


class IdentityMap(GaugeMap):
    def forward(self, psi: Wavefunction, t: float) -> Wavefunction:
        return psi

    def inverse(self, psi: Wavefunction, t: float) -> Wavefunction:
        return psi

    def describe(self) -> str:
        return "identity"


PhaseFunction = Callable[[Tuple[np.ndarray, ...], float], np.ndarray]


@dataclass(frozen=True)
class PhaseGaugeMap(GaugeMap):
    """Linear gauge transformation psi -> exp(i theta_t(x)) psi."""
    phase: PhaseFunction

    @classmethod
    def static(cls, theta: np.ndarray) -> "PhaseGaugeMap":
        theta = np.asarray(theta, dtype=float)
        return cls(lambda coords, t: theta)

    def _theta(self, psi: Wavefunction, t: float) -> np.ndarray:
        return np.asarray(self.phase(psi.grid.coordinates(), t), dtype=float)

    def forward(self, psi: Wavefunction, t: float) -> Wavefunction:
        return psi.with_values(psi.values * np.exp(1j * self._theta(psi, t)))

    def inverse(self, psi: Wavefunction, t: float) -> Wavefunction:
        return psi.with_values(psi.values * np.exp(-1j * self._theta(psi, t)))

    def describe(self) -> str:
        return "phase"


@dataclass(frozen=True)
class NonlinearGaugeMap(GaugeMap):
    """N_gamma(t) driven by a gauge schedule."""
    schedule: GaugeSchedule
    policy: NodeFloorPolicy = field(default_factory=NodeFloorPolicy)

    def forward(self, psi: Wavefunction, t: float) -> Wavefunction:
        return apply_gauge(psi, self.schedule.gamma(t), self.policy)

    def inverse(self, psi: Wavefunction, t: float) -> Wavefunction:
        return invert_gauge(psi, self.schedule.gamma(t), self.policy)

    def describe(self) -> str:
        if self.schedule.is_constant:
            return f"N_gamma(gamma={self.schedule.gamma(0.0):g})"
        return f"N_gamma(schedule with {len(self.schedule.breakpoints)} breakpoints)"
