"""Effects: evolve, then measure position."""
import logging
import weakref
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..core.errors import DomainError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, born_probability
from ..dynamics.propagator import EvolutionSpec, propagate

logger = logging.getLogger(__name__)

# Evolutions already reported as non-homogeneous
_CAVEATED = weakref.WeakSet()


@dataclass(frozen=True, eq=False)
class Effect:
    """
    f(psi) = born_probability(T(psi), region) with T one finitely presented
    evolution (spec for duration). Without a spec, T is the identity.
    """
    region: Region
    spec: Optional[EvolutionSpec] = None
    duration: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.region.space is not Space.POSITION:
            raise DomainError("effects measure position; map momentum sets through a velocity cone")
        if self.duration < 0:
            raise DomainError(f"effect duration must be non-negative, got {self.duration}")

    @property
    def is_trivial(self) -> bool:
        return self.spec is None or self.duration == 0

    @property
    def is_linear(self) -> bool:
        return self.is_trivial or self.spec.is_linear

    @property
    def is_homogeneous(self) -> bool:
        """f(c psi) = f(psi): linear evolutions and pure gauge schedules."""
        return self.is_trivial or self.spec.coefficients.is_linear

    def evolve(self, psi: Wavefunction) -> Wavefunction:
        """Apply T; raises BlowupError if a nonlinear run blows up."""
        if self.is_trivial:
            return psi
        return propagate(psi, self.spec, psi.time + self.duration)

    def measure(self, evolved: Wavefunction) -> float:
        return born_probability(evolved, self.region)

    def __call__(self, psi: Wavefunction) -> float:
        if not self.is_homogeneous and self.spec not in _CAVEATED:
            _CAVEATED.add(self.spec)
            logger.warning(
                "Effect evolution has nonlinear terms outside the gauge dictionary; "
                "f(c psi) may differ from f(psi), so results depend on the state normalization"
            )
        return self.measure(self.evolve(psi))

    def describe(self) -> str:
        if self.label:
            return self.label
        evolution = "identity" if self.is_trivial else f"T({self.duration:g})"
        return f"{evolution} then {self.region.describe()}"


def central_cells(grid: Grid, count: int = 8, fraction: float = 0.5, axis: int = 0) -> Tuple[Region, ...]:
    """Equal cells spanning the central fraction of one axis."""
    half = 0.5 * fraction * grid.lengths[axis]
    return Region.partition(grid, count, axis=axis, span=(-half, half))


def effect_family(
    evolutions: Sequence[Tuple[Optional[EvolutionSpec], float]],
    regions: Sequence[Region],
) -> List[Effect]:
    """All (evolution, region) combinations, evolutions outermost."""
    effects = []
    for index, (spec, duration) in enumerate(evolutions):
        for region in regions:
            effects.append(
                Effect(region, spec, duration, label=f"T{index}({duration:g}) then {region.describe()}")
            )
    return effects
