"""Density/current functionals and the local nonlinear right-hand side."""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, List, Optional

import numpy as np

from ..core.errors import ConfigurationError, DegenerateStateError, ShapeMismatchError
from ..core.grid import Grid
from ..core.spectral import gradient, laplacian
from ..core.wavefunction import Wavefunction, require_finite

if TYPE_CHECKING:
    from ..dynamics.coefficients import CoefficientSet

logger = logging.getLogger(__name__)

FLOOR_WARNING_FRACTION = 0.01


class FunctionalId(Enum):
    R1 = "R1"    # div J / rho
    R2 = "R2"    # lap rho / rho
    R3 = "R3"    # J^2 / rho^2
    R4 = "R4"    # J . grad rho / rho^2
    R5 = "R5"    # |grad rho|^2 / rho^2
    LOG = "LOG"  # ln rho


@dataclass(frozen=True)
class NodeFloorPolicy:
    """Relative density floor: rho_eff = max(rho, epsilon_rel * max(rho))."""
    epsilon_rel: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.epsilon_rel <= 1e-6:
            raise ConfigurationError(
                f"node floor epsilon_rel must lie in (0, 1e-6], got {self.epsilon_rel}"
            )

    @classmethod
    def from_config(cls) -> "NodeFloorPolicy":
        from ..config import config
        return cls(config.NODE_FLOOR)

    def floor(self, rho: np.ndarray) -> float:
        return self.epsilon_rel * float(np.max(rho))

    def effective_density(self, rho: np.ndarray) -> np.ndarray:
        peak = float(np.max(rho))
        if peak == 0.0:
            raise DegenerateStateError("density vanishes everywhere")
        return np.maximum(rho, self.epsilon_rel * peak)

    def floored_fraction(self, rho: np.ndarray) -> float:
        """Share of cells where the floor replaces the density."""
        return float(np.mean(rho < self.floor(rho)))


class FunctionalFields:
    """
    Lazily evaluated density/current fields of one wavefunction array.

    Derivatives of rho are formed from spectral derivatives of psi by the
    product rule (grad rho = 2 Re(conj psi grad psi),
    lap rho = 2 Re(conj psi lap psi) + 2 |grad psi|^2), so rho's doubled
    bandwidth never has to be resolved by the grid.
    """

    def __init__(self, values: np.ndarray, grid: Grid, policy: NodeFloorPolicy):
        self.values = values
        self.grid = grid
        self.policy = policy

    @cached_property
    def rho(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @cached_property
    def rho_eff(self) -> np.ndarray:
        return self.policy.effective_density(self.rho)

    @cached_property
    def grad_psi(self) -> List[np.ndarray]:
        return gradient(self.values, self.grid)

    @cached_property
    def lap_psi(self) -> np.ndarray:
        return laplacian(self.values, self.grid)

    @cached_property
    def current(self) -> List[np.ndarray]:
        conj = np.conj(self.values)
        return [np.imag(conj * d) for d in self.grad_psi]

    @cached_property
    def grad_rho(self) -> List[np.ndarray]:
        conj = np.conj(self.values)
        return [2.0 * np.real(conj * d) for d in self.grad_psi]

    @cached_property
    def lap_rho(self) -> np.ndarray:
        grad_sq = sum(np.abs(d) ** 2 for d in self.grad_psi)
        return 2.0 * np.real(np.conj(self.values) * self.lap_psi) + 2.0 * grad_sq

    @cached_property
    def div_current(self) -> np.ndarray:
        return np.imag(np.conj(self.values) * self.lap_psi)

    def r1(self) -> np.ndarray:
        return self.div_current / self.rho_eff

    def r2(self) -> np.ndarray:
        return self.lap_rho / self.rho_eff

    def r3(self) -> np.ndarray:
        return sum(j ** 2 for j in self.current) / self.rho_eff ** 2

    def r4(self) -> np.ndarray:
        return sum(j * g for j, g in zip(self.current, self.grad_rho)) / self.rho_eff ** 2

    def r5(self) -> np.ndarray:
        return sum(g ** 2 for g in self.grad_rho) / self.rho_eff ** 2

    def log(self) -> np.ndarray:
        return np.log(self.rho_eff)

    def get(self, functional: FunctionalId) -> np.ndarray:
        return {
            FunctionalId.R1: self.r1,
            FunctionalId.R2: self.r2,
            FunctionalId.R3: self.r3,
            FunctionalId.R4: self.r4,
            FunctionalId.R5: self.r5,
            FunctionalId.LOG: self.log,
        }[functional]()


def _require_nonzero(psi: Wavefunction):
    require_finite(psi)
    if not np.any(psi.values):
        raise DegenerateStateError("functionals need a state of nonzero norm")


def evaluate(
    functional: FunctionalId,
    psi: Wavefunction,
    policy: Optional[NodeFloorPolicy] = None,
) -> np.ndarray:
    """Evaluate one functional pointwise on the grid."""
    _require_nonzero(psi)
    fields = FunctionalFields(psi.values, psi.grid, policy or NodeFloorPolicy())
    fraction = fields.policy.floored_fraction(fields.rho)
    if fraction > FLOOR_WARNING_FRACTION:
        logger.warning(f"Node floor engaged on {fraction:.1%} of cells while evaluating {functional.value}")
    return fields.get(functional)


def local_rhs(
    values: np.ndarray,
    grid: Grid,
    coefficients: "CoefficientSet",
    policy: NodeFloorPolicy,
    potential: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Array-level local part F of i dpsi/dt = -lap psi / 2m + F(psi).

    Functional terms are only evaluated for nonzero coefficients.
    """
    c = coefficients
    total = np.zeros(grid.shape, dtype=float)
    imaginary = np.zeros(grid.shape, dtype=float)
    if potential is not None and c.mu0 != 0.0:
        total = total + c.mu0 * potential

    if c.has_functional_terms():
        fields = FunctionalFields(values, grid, policy)
        if c.nu1:
            imaginary = imaginary + c.nu1 * fields.r1()
        if c.nu2:
            imaginary = imaginary + c.nu2 * fields.r2()
        for coefficient, term in (
            (c.mu1, fields.r1),
            (c.mu2, fields.r2),
            (c.mu3, fields.r3),
            (c.mu4, fields.r4),
            (c.mu5, fields.r5),
            (c.alpha1, fields.log),
        ):
            if coefficient:
                total = total + coefficient * term()

    return (total + 1j * imaginary) * values


def nonlinear_rhs(
    psi: Wavefunction,
    coefficients: "CoefficientSet",
    potential: Optional[np.ndarray] = None,
    policy: Optional[NodeFloorPolicy] = None,
) -> np.ndarray:
    """
    Local (non-kinetic) time-derivative term of the unified family.

    Returns i*(nu1 R1 + nu2 R2) psi + mu0 V psi + sum_k mu_k R_k psi
    + alpha1 ln(rho_eff) psi.
    """
    _require_nonzero(psi)
    coefficients.require_finite()
    if potential is not None:
        potential = np.asarray(potential, dtype=float)
        if potential.shape != psi.grid.shape:
            raise ShapeMismatchError(
                f"potential shape {potential.shape} does not match grid {psi.grid.shape}"
            )
    return local_rhs(psi.values, psi.grid, coefficients, policy or NodeFloorPolicy(), potential)
