"""Mixtures, density matrices and distinguishability by effects."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import CapacityError, ConfigurationError, ShapeMismatchError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, require_finite
from .effects import Effect

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Mixture:
    """Weighted ensemble {(lambda_j, phi_j)} on a common grid."""
    components: Tuple[Tuple[float, Wavefunction], ...]

    def __post_init__(self):
        components = tuple((float(w), psi) for w, psi in self.components)
        if not components:
            raise ConfigurationError("a mixture needs at least one component")
        for weight, psi in components:
            if not 0.0 < weight <= 1.0:
                raise ConfigurationError(f"mixture weights must lie in (0, 1], got {weight}")
            require_finite(psi)
        total = math.fsum(w for w, _ in components)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ConfigurationError(f"mixture weights sum to {total!r}, not 1")
        grid = components[0][1].grid
        if any(psi.grid != grid for _, psi in components):
            raise ShapeMismatchError("mixture components must share one grid")
        object.__setattr__(self, "components", components)

    @classmethod
    def pure(cls, psi: Wavefunction) -> "Mixture":
        return cls(((1.0, psi),))

    @property
    def grid(self) -> Grid:
        return self.components[0][1].grid

    @property
    def weights(self) -> List[float]:
        return [w for w, _ in self.components]

    @property
    def states(self) -> List[Wavefunction]:
        return [psi for _, psi in self.components]

    def merge(self, other: "Mixture", weight: float) -> "Mixture":
        """weight * self + (1 - weight) * other as one mixture."""
        if not 0.0 <= weight <= 1.0:
            raise ConfigurationError(f"merge weight must lie in [0, 1], got {weight}")
        if weight == 1.0:
            return self
        if weight == 0.0:
            return other
        first = [(weight * w, psi) for w, psi in self.components]
        second = [((1.0 - weight) * w, psi) for w, psi in other.components]
        return Mixture(tuple(first + second))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Dense W = sum_j lambda_j |phi_j><phi_j| in the orthonormal cell basis,
    so W[a, b] = sum_j lambda_j phi_j(a) conj(phi_j(b)) dx.
    """
    grid: Grid
    matrix: np.ndarray

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def max_difference(self, other: "DensityMatrix") -> float:
        if other.grid != self.grid:
            raise ShapeMismatchError("density matrices on different grids")
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def region_probability(self, region: Region) -> float:
        """tr(W E(B)) for a position region."""
        if region.space is not Space.POSITION:
            raise ConfigurationError("region_probability needs a position-space region")
        mask = region.mask(self.grid).reshape(-1)
        return float(np.real(np.sum(np.diag(self.matrix)[mask])))

    def unravel(self, cutoff: float = 1e-14) -> Mixture:
        """Eigen-mixture of W; eigenvalues below cutoff * max are dropped."""
        values, vectors = np.linalg.eigh(self.matrix)
        keep = values > cutoff * float(np.max(values))
        values = values[keep]
        vectors = vectors[:, keep]
        weights = values / math.fsum(values)
        scale = 1.0 / math.sqrt(self.grid.cell_volume)
        components = [
            (float(w), Wavefunction(self.grid, (vectors[:, i] * scale).reshape(self.grid.shape)))
            for i, w in enumerate(weights)
        ]
        # fsum residue lands on the largest weight
        components.sort(key=lambda item: -item[0])
        residue = 1.0 - math.fsum(w for w, _ in components)
        components[0] = (components[0][0] + residue, components[0][1])
        return Mixture(tuple(components))


def density_matrix(mixture: Mixture, max_points: Optional[int] = None) -> DensityMatrix:
    from ..config import config

    limit = max_points or config.MAX_DENSITY_MATRIX_POINTS
    grid = mixture.grid
    if grid.size > limit:
        raise CapacityError(f"dense density matrix limited to {limit} points, grid has {grid.size}")
    scale = math.sqrt(grid.cell_volume)
    matrix = np.zeros((grid.size, grid.size), dtype=complex)
    for weight, psi in mixture.components:
        v = psi.values.reshape(-1) * scale
        matrix += weight * np.outer(v, v.conj())
    return DensityMatrix(grid, matrix)


def effect_on_mixture(effect: Effect, mixture: Mixture) -> float:
    """f[pi] = sum_j lambda_j f(phi_j)."""
    return math.fsum(w * effect(psi) for w, psi in mixture.components)


@dataclass
class DistinguishabilityResult:
    distinguishable: bool
    gap: float
    witness: Optional[Effect]
    effect_count: int
    tolerance: float
    values: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.distinguishable:
            return "distinguishable"
        return "indistinguishable"

    def describe(self) -> str:
        if self.distinguishable:
            return f"distinguishable by {self.witness.describe()} (gap {self.gap:.3e})"
        return f"indistinguishable relative to {self.effect_count} sampled effects (max gap {self.gap:.3e})"


class _EvolutionCache:
    """Evolved components shared by effects with the same evolution."""

    def __init__(self):
        self._states: Dict[Tuple[int, float, int, int], Wavefunction] = {}

    def evolved(self, effect: Effect, mixture_index: int, component_index: int, psi: Wavefunction) -> Wavefunction:
        key = (id(effect.spec), effect.duration, mixture_index, component_index)
        if key not in self._states:
            self._states[key] = effect.evolve(psi)
        return self._states[key]


def mixtures_distinguishable(
    first: Mixture,
    second: Mixture,
    effects: Sequence[Effect],
    tol: float = 1e-10,
) -> DistinguishabilityResult:
    """
    Compare f[first] and f[second] over a finite effect family.

    A "distinguishable" verdict is certified by its witness; an
    "indistinguishable" one only holds relative to the sampled family.
    """
    if not effects:
        raise ConfigurationError("distinguishability needs a nonempty effect family")
    cache = _EvolutionCache()
    best_gap = 0.0
    witness = None
    evaluated: List[Tuple[float, float]] = []

    for effect in effects:
        values = []
        for mixture_index, mixture in enumerate((first, second)):
            total = math.fsum(
                w * effect.measure(cache.evolved(effect, mixture_index, j, psi))
                for j, (w, psi) in enumerate(mixture.components)
            )
            values.append(total)
        evaluated.append((values[0], values[1]))
        gap = abs(values[0] - values[1])
        if gap > best_gap:
            best_gap, witness = gap, effect

    result = DistinguishabilityResult(
        distinguishable=best_gap > tol,
        gap=best_gap,
        witness=witness if best_gap > tol else None,
        effect_count=len(effects),
        tolerance=tol,
        values=evaluated,
    )
    logger.info(f"Mixture comparison: {result.describe()}")
    return result
