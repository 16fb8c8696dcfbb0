"""Coefficients of the unified nonlinear family and the gauge dictionary."""
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict

from ..core.errors import ConfigurationError

NONLINEAR_NAMES = ("nu1", "nu2", "mu1", "mu2", "mu3", "mu4", "mu5", "alpha1")


@dataclass(frozen=True)
class CoefficientSet:
    """
    Real couplings of

        i dpsi/dt = -lap psi / 2m + i (nu1 R1 + nu2 R2) psi + mu0 V psi
                    + sum_k mu_k R_k psi + alpha1 ln(rho) psi

    The default instance is the linear theory.
    """
    nu1: float = 0.0
    nu2: float = 0.0
    mu0: float = 1.0
    mu1: float = 0.0
    mu2: float = 0.0
    mu3: float = 0.0
    mu4: float = 0.0
    mu5: float = 0.0
    alpha1: float = 0.0

    def __post_init__(self):
        for field in fields(self):
            object.__setattr__(self, field.name, float(getattr(self, field.name)))
        self.require_finite()

    @classmethod
    def linear(cls) -> "CoefficientSet":
        return cls()

    def require_finite(self):
        for name, value in self.as_dict().items():
            if not math.isfinite(value):
                raise ConfigurationError(f"coefficient {name} must be finite, got {value}")

    def has_functional_terms(self) -> bool:
        return any(getattr(self, name) != 0.0 for name in NONLINEAR_NAMES)

    @property
    def is_linear(self) -> bool:
        return not self.has_functional_terms()

    def plus(self, other: "CoefficientSet") -> "CoefficientSet":
        """Add the nonlinear parts of other; mu0 is kept from self."""
        return replace(
            self,
            **{name: getattr(self, name) + getattr(other, name) for name in NONLINEAR_NAMES},
        )

    def perturbed(self, name: str, relative: float) -> "CoefficientSet":
        """Scale a single coefficient by (1 + relative)."""
        if name not in self.as_dict():
            raise ConfigurationError(f"unknown coefficient {name}")
        return replace(self, **{name: getattr(self, name) * (1.0 + relative)})

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def linearizable_coefficients(gamma: float, gamma_dot: float, mass: float) -> CoefficientSet:
    """
    Coefficients of the equation obtained from the linear one by the gauge
    map psi -> psi * exp(i gamma ln|psi|).

    Units hbar = 1 with J = Im(conj psi grad psi).

    Args:
        gamma: Gauge parameter at the evaluation time
        gamma_dot: Its time derivative
        mass: Particle mass

    Returns:
        CoefficientSet with mu0 = 1
    """
    if not mass > 0:
        raise ConfigurationError(f"mass must be positive, got {mass}")
    return CoefficientSet(
        nu1=0.0,
        nu2=gamma / (4.0 * mass),
        mu0=1.0,
        mu1=gamma / (2.0 * mass),
        mu2=-gamma ** 2 / (4.0 * mass),
        mu3=0.0,
        mu4=-gamma / (2.0 * mass),
        mu5=gamma ** 2 / (8.0 * mass),
        alpha1=-gamma_dot / 2.0,
    )
