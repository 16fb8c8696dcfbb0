"""Two-particle runs on tensor grids and the remote-potential signaling test."""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from ..core.errors import ConfigurationError, DomainError, ShapeMismatchError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, mask_probability, norm, require_finite
from ..dynamics.coefficients import CoefficientSet
from ..dynamics.propagator import (
    BlowupDiagnostic,
    EvolutionSpec,
    Scheme,
    propagate,
    propagate_nonlinear,
)
from ..functionals.fields import NodeFloorPolicy

logger = logging.getLogger(__name__)

ENTANGLEMENT_THRESHOLD = 1e-8


def _default_policy() -> NodeFloorPolicy:
    return NodeFloorPolicy.from_config()


@dataclass(frozen=True, eq=False)
class TwoParticleSpec:
    """
    Two particles on a tensor grid with V(x1, x2) = V1(x1) + V2(x2).

    Only the pair (V1, V2) is stored; the 2D field is formed when a run
    starts.
    """
    grid: Grid
    potential_1: np.ndarray
    potential_2: np.ndarray
    initial: Wavefunction
    coefficients: CoefficientSet = field(default_factory=CoefficientSet)
    mass: float = 1.0
    dt: float = 1e-3
    scheme: Scheme = Scheme.STRANG
    policy: NodeFloorPolicy = field(default_factory=_default_policy)

    def __post_init__(self):
        if self.grid.dim != 2:
            raise ConfigurationError("two-particle runs need a 2D tensor grid")
        potential_1 = np.asarray(self.potential_1, dtype=float)
        potential_2 = np.asarray(self.potential_2, dtype=float)
        if potential_1.shape != (self.grid.points[0],) or potential_2.shape != (self.grid.points[1],):
            raise ShapeMismatchError("single-particle potentials must match their axes")
        if self.initial.grid != self.grid:
            raise ShapeMismatchError("initial state not on the tensor grid")
        object.__setattr__(self, "potential_1", potential_1)
        object.__setattr__(self, "potential_2", potential_2)

    def potential(self, potential_2: Optional[np.ndarray] = None) -> np.ndarray:
        remote = self.potential_2 if potential_2 is None else np.asarray(potential_2, dtype=float)
        if remote.shape != self.potential_2.shape:
            raise ShapeMismatchError("remote potential variant does not match axis 2")
        return self.potential_1[:, None] + remote[None, :]

    def evolution_spec(self, potential_2: Optional[np.ndarray] = None) -> EvolutionSpec:
        return EvolutionSpec(
            grid=self.grid,
            potential=self.potential(potential_2),
            coefficients=self.coefficients,
            mass=self.mass,
            dt=self.dt,
            scheme=self.scheme,
            policy=self.policy,
        )

    def particle_spec(self, axis: int) -> EvolutionSpec:
        """One-particle evolution along one axis with the same equation."""
        potential = self.potential_1 if axis == 0 else self.potential_2
        return EvolutionSpec(
            grid=self.grid.axis_grid(axis),
            potential=potential,
            coefficients=self.coefficients,
            mass=self.mass,
            dt=self.dt,
            scheme=self.scheme,
            policy=self.policy,
        )

    def with_initial(self, initial: Wavefunction) -> "TwoParticleSpec":
        return replace(self, initial=initial)

    def with_coefficients(self, coefficients: CoefficientSet) -> "TwoParticleSpec":
        return replace(self, coefficients=coefficients)

    def with_dt(self, dt: float) -> "TwoParticleSpec":
        return replace(self, dt=dt)


def schmidt_coefficients(psi: Wavefunction) -> np.ndarray:
    """Normalized squared singular values of psi(x1, x2), descending."""
    require_finite(psi)
    if psi.grid.dim != 2:
        raise ConfigurationError("Schmidt decomposition needs a two-particle state")
    singular = np.linalg.svd(psi.values, compute_uv=False)
    weights = singular ** 2
    return weights / np.sum(weights)


def is_entangled(psi: Wavefunction, threshold: float = ENTANGLEMENT_THRESHOLD) -> bool:
    return bool(schmidt_coefficients(psi)[0] < 1.0 - threshold)


def marginal_probability(psi: Wavefunction, region: Region, particle: int = 0) -> float:
    """Probability that one particle lies in a 1D position region."""
    if region.space is not Space.POSITION:
        raise DomainError("marginals are positional")
    require_finite(psi)
    other = 1 - particle
    marginal = np.sum(np.abs(psi.values) ** 2, axis=other)
    mask = region.mask(psi.grid.axis_grid(particle))
    return mask_probability(np.sqrt(marginal), mask)


@dataclass
class SignalingReport:
    statistic: float
    entangled: bool
    probabilities: List[List[float]]
    variant_count: int
    region_count: int
    blowup: Optional[BlowupDiagnostic] = None

    @property
    def blew_up(self) -> bool:
        return self.blowup is not None

    def signals(self, tolerance: float) -> bool:
        return not self.blew_up and self.statistic > tolerance


def gisin_experiment(
    spec: TwoParticleSpec,
    remote_potentials: Sequence[np.ndarray],
    t: float,
    marginal_regions: Sequence[Region],
) -> SignalingReport:
    """
    Particle-1 marginals after time t for each remote potential V2.

    The statistic is max over regions and variants of |p_v - p_0|, with
    variant 0 running with potential_2 unchanged. A blow-up stops the
    experiment and is embedded in the report.
    """
    if t <= 0:
        raise DomainError(f"signaling experiment needs t > 0, got {t}")
    if not marginal_regions:
        raise ConfigurationError("signaling experiment needs marginal regions")

    entangled = is_entangled(spec.initial)
    variants = [spec.potential_2] + [np.asarray(v, dtype=float) for v in remote_potentials]
    probabilities: List[List[float]] = []

    for index, remote in enumerate(variants):
        result = propagate_nonlinear(spec.initial, spec.evolution_spec(remote), spec.initial.time + t)
        if isinstance(result, BlowupDiagnostic):
            logger.warning(f"Remote variant {index} blew up: {result.describe()}")
            return SignalingReport(
                statistic=math.nan,
                entangled=entangled,
                probabilities=probabilities,
                variant_count=len(variants),
                region_count=len(marginal_regions),
                blowup=result,
            )
        probabilities.append([marginal_probability(result, region) for region in marginal_regions])

    reference = probabilities[0]
    statistic = max(
        (abs(p - p0) for row in probabilities[1:] for p, p0 in zip(row, reference)),
        default=0.0,
    )
    logger.info(
        f"Signaling statistic {statistic:.3e} over {len(variants) - 1} remote variants "
        f"({'entangled' if entangled else 'product'} initial state)"
    )
    return SignalingReport(statistic, entangled, probabilities, len(variants), len(marginal_regions))


def product_factors(psi: Wavefunction) -> List[Wavefunction]:
    """Rank-one factors (phi1, phi2) with psi ~ phi1 (x) phi2."""
    u, s, vh = np.linalg.svd(psi.values)
    root = math.sqrt(float(s[0]))
    return [
        Wavefunction(psi.grid.axis_grid(0), u[:, 0] * root, psi.time),
        Wavefunction(psi.grid.axis_grid(1), vh[0, :] * root, psi.time),
    ]


def factorization_residual(spec: TwoParticleSpec, t: float) -> float:
    """
    Relative L2 distance between the 2D run of a product state and the
    tensor product of its independently evolved 1D factors.
    """
    if is_entangled(spec.initial):
        raise ConfigurationError("factorization check needs a product initial state")
    final_time = spec.initial.time + t
    joint = propagate(spec.initial, spec.evolution_spec(), final_time)
    first, second = (
        propagate(factor, spec.particle_spec(axis), final_time)
        for axis, factor in enumerate(product_factors(spec.initial))
    )
    product = np.outer(first.values, second.values)
    return norm(joint.with_values(joint.values - product)) / norm(spec.initial)
