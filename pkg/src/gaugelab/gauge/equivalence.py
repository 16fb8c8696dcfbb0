"""Sampling-based certification of topological equivalence between two systems."""
import logging
from dataclasses import dataclass
from typing import List, Sequence

from ..core.errors import ConfigurationError, ShapeMismatchError
from ..core.grid import Region
from ..core.wavefunction import Wavefunction, born_probability, norm
from ..dynamics.propagator import EvolutionSpec, propagate
from .transforms import GaugeMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuantumSystem:
    """
    A system on a periodic grid: its evolution under fixed external
    conditions. The positional observable is always the Born rule.
    """
    name: str
    spec: EvolutionSpec

    @property
    def grid(self):
        return self.spec.grid

    def evolve(self, psi: Wavefunction, t: float) -> Wavefunction:
        return propagate(psi, self.spec, psi.time + t)


@dataclass
class EquivalenceReport:
    max_position_residual: float
    max_evolution_residual: float
    sample_count: int
    position_tolerance: float
    evolution_tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.max_position_residual <= self.position_tolerance
            and self.max_evolution_residual <= self.evolution_tolerance
        )

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def check_topological_equivalence(
    system_a: QuantumSystem,
    system_b: QuantumSystem,
    gauge_map: GaugeMap,
    states: Sequence[Wavefunction],
    regions: Sequence[Region],
    times: Sequence[float],
    position_tolerance: float = 1e-12,
    evolution_tolerance: float = 1e-4,
) -> EquivalenceReport:
    """
    Check p_B = p_B' . N and T_t = N^-1 . T'_t . N on sampled data.

    States of system_a are mapped into system_b by gauge_map.forward at the
    start time and pulled back with gauge_map.inverse at the final time.
    Residuals are worst cases over all samples; the evolution residual is
    relative to ||psi||.

    Raises:
        ShapeMismatchError: If the systems or states live on different grids
        ConfigurationError: If a sample set is empty
    """
    if system_a.grid != system_b.grid:
        raise ShapeMismatchError("equivalent systems must share their physical space")
    if not states or not regions or not times:
        raise ConfigurationError("equivalence check needs states, regions and times")
    for psi in states:
        if psi.grid != system_a.grid:
            raise ShapeMismatchError("sample state not on the systems' grid")

    position_residual = 0.0
    evolution_residual = 0.0
    samples = 0

    for index, psi in enumerate(states):
        mapped = gauge_map.forward(psi, psi.time)
        for region in regions:
            gap = abs(born_probability(psi, region) - born_probability(mapped, region))
            position_residual = max(position_residual, gap)
            samples += 1

        scale = norm(psi)
        for t in times:
            evolved_a = system_a.evolve(psi, t)
            evolved_b = system_b.evolve(mapped, t)
            pulled_back = gauge_map.inverse(evolved_b, evolved_b.time)
            residual = norm(pulled_back.with_values(pulled_back.values - evolved_a.values)) / scale
            evolution_residual = max(evolution_residual, residual)
            samples += 1
            logger.debug(f"state {index} t={t:g}: evolution residual {residual:.3e}")

    report = EquivalenceReport(
        max_position_residual=position_residual,
        max_evolution_residual=evolution_residual,
        sample_count=samples,
        position_tolerance=position_tolerance,
        evolution_tolerance=evolution_tolerance,
    )
    logger.info(
        f"Equivalence {system_a.name} ~ {system_b.name} via {gauge_map.describe()}: "
        f"{report.verdict} (position {position_residual:.2e}, evolution {evolution_residual:.2e})"
    )
    return report
