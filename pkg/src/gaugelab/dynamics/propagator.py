"""Time evolution on periodic grids.

The default scheme is Strang splitting: exact Fourier kinetic step, exact
potential phase, and one classical RK4 step per half step for the local
nonlinear functionals. A fully explicit RK4 pseudo-spectral scheme is kept
for cross-validation.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, List, Optional, Sequence, Union

import numpy as np

from ..core.errors import BlowupError, ConfigurationError, DomainError, ShapeMismatchError, StabilityError
from ..core.grid import Grid
from ..core.spectral import laplacian
from ..core.wavefunction import Wavefunction, require_finite, require_same_grid
from ..functionals.fields import NodeFloorPolicy, local_rhs
from .coefficients import CoefficientSet, linearizable_coefficients

if TYPE_CHECKING:
    from ..gauge.schedule import GaugeSchedule

logger = logging.getLogger(__name__)

RK4_STABILITY_LIMIT = 2.0 * math.sqrt(2.0)

# Tolerated excess of the numerical over the exact per-step mode growth.
LOCAL_GROWTH_MARGIN = 1e-2
MODE_SAMPLES = 256


class Scheme(Enum):
    STRANG = "strang_split"
    RK4 = "rk4_full"


class BlowupTrigger(Enum):
    NAN = "nan"
    NORM_GROWTH = "norm_growth"
    OVERFLOW = "overflow"


@dataclass(frozen=True)
class BlowupDiagnostic:
    """Returned instead of a state when a run stops being finite or bounded."""
    time_of_detection: float
    trigger: BlowupTrigger
    step: int
    initial_norm: float
    last_norm: float

    def describe(self) -> str:
        return (
            f"{self.trigger.value} at t={self.time_of_detection:.6g} "
            f"(step {self.step}, norm {self.initial_norm:.6g} -> {self.last_norm:.6g})"
        )


def _default_policy() -> NodeFloorPolicy:
    return NodeFloorPolicy.from_config()


def _rk4_polynomial(z: np.ndarray) -> np.ndarray:
    """1 + z + z^2/2 + z^3/6 + z^4/24 for a stack of 2x2 matrices."""
    term = np.broadcast_to(np.eye(2), z.shape)
    total = term.copy()
    for order in range(1, 5):
        term = term @ z / order
        total = total + term
    return total


@dataclass(frozen=True, eq=False)
class EvolutionSpec:
    """
    External conditions and numerics of one time evolution.

    The potential is time independent; None means V = 0. With a gauge
    schedule attached, the step coefficients are the stored coefficients
    plus the gauge dictionary at the step time.
    """
    grid: Grid
    potential: Optional[np.ndarray] = None
    coefficients: CoefficientSet = field(default_factory=CoefficientSet)
    mass: float = 1.0
    dt: float = 1e-3
    scheme: Scheme = Scheme.STRANG
    gauge_schedule: Optional["GaugeSchedule"] = None
    policy: NodeFloorPolicy = field(default_factory=_default_policy)

    def __post_init__(self):
        if self.potential is None:
            potential = np.zeros(self.grid.shape)
        else:
            potential = np.asarray(self.potential, dtype=float)
        if potential.shape != self.grid.shape:
            raise ShapeMismatchError(
                f"potential shape {potential.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(potential)):
            raise ConfigurationError("potential must be finite")
        object.__setattr__(self, "potential", potential)

        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ConfigurationError(f"mass must be positive, got {self.mass}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        self.coefficients.require_finite()

    @property
    def is_linear(self) -> bool:
        return self.coefficients.is_linear and self.gauge_schedule is None

    @property
    def kinetic_phase(self) -> float:
        """Largest kinetic phase per step, dt * k_max^2 / 2m."""
        return self.dt * self.grid.k_max_squared / (2.0 * self.mass)

    def validate(self):
        if self.scheme is Scheme.STRANG:
            if self.kinetic_phase >= math.pi:
                raise StabilityError(
                    f"dt={self.dt:g} does not resolve the kinetic phase "
                    f"({self.kinetic_phase:.3g} >= pi); reduce dt or the grid resolution"
                )
        else:
            spectral_radius = self.kinetic_phase + self.dt * abs(self.coefficients.mu0) * float(
                np.max(np.abs(self.potential))
            )
            if spectral_radius >= RK4_STABILITY_LIMIT:
                raise StabilityError(
                    f"dt={self.dt:g} outside the RK4 stability region "
                    f"({spectral_radius:.3g} >= {RK4_STABILITY_LIMIT:.3g})"
                )

        for coefficients in self._coefficient_samples():
            if not coefficients.has_functional_terms():
                continue
            growth = self.local_growth(coefficients)
            if growth > 1.0 + LOCAL_GROWTH_MARGIN:
                raise StabilityError(
                    f"dt={self.dt:g} does not resolve the local nonlinear terms "
                    f"(short-wavelength modes grow {growth:.3g}x per step beyond the exact rate); reduce dt"
                )

    def _coefficient_samples(self) -> List[CoefficientSet]:
        if self.gauge_schedule is None:
            return [self.coefficients]
        return [self.coefficients_at(float(t)) for t in self.gauge_schedule.times]

    def local_growth(self, coefficients: CoefficientSet) -> float:
        """
        Worst ratio of numerical to exact per-step growth of short-wavelength
        perturbations, over wavenumbers up to the grid's k_max.

        A relative perturbation a + ib of a smooth state at wavenumber k
        obeys da/dt = -k^2 (2 nu2 a + nu1 b), db/dt = k^2 (2 mu2 a + mu1 b)
        under the second-order part of the local terms, and rotates by
        k^2 / 2m under the kinetic term. The lower-order terms are left out.
        """
        c = coefficients
        k_squared = np.linspace(0.0, self.grid.k_max_squared, MODE_SAMPLES + 1)[1:]
        local = k_squared[:, None, None] * np.array([[-2.0 * c.nu2, -c.nu1], [2.0 * c.mu2, c.mu1]])
        omega = k_squared / (2.0 * self.mass)
        kinetic = omega[:, None, None] * np.array([[0.0, 1.0], [-1.0, 0.0]])

        exact = np.exp(np.max(np.linalg.eigvals(local + kinetic).real, axis=-1) * self.dt)
        if self.scheme is Scheme.STRANG:
            half = _rk4_polynomial(0.5 * self.dt * local)
            cos, sin = np.cos(omega * self.dt), np.sin(omega * self.dt)
            rotation = np.stack([np.stack([cos, sin], axis=-1), np.stack([-sin, cos], axis=-1)], axis=-2)
            amplification = half @ rotation @ half
        else:
            amplification = _rk4_polynomial(self.dt * (local + kinetic))
        numerical = np.max(np.abs(np.linalg.eigvals(amplification)), axis=-1)
        return float(np.max(numerical / np.maximum(exact, 1.0)))

    def coefficients_at(self, t: float) -> CoefficientSet:
        if self.gauge_schedule is None:
            return self.coefficients
        gauge = linearizable_coefficients(
            self.gauge_schedule.gamma(t), self.gauge_schedule.gamma_dot(t), self.mass
        )
        return self.coefficients.plus(gauge)

    def with_dt(self, dt: float) -> "EvolutionSpec":
        return replace(self, dt=dt)

    def with_coefficients(self, coefficients: CoefficientSet) -> "EvolutionSpec":
        return replace(self, coefficients=coefficients)

    def with_potential(self, potential: Optional[np.ndarray]) -> "EvolutionSpec":
        return replace(self, potential=potential)


def _kinetic_multiplier(grid: Grid, mass: float, t: float) -> np.ndarray:
    return np.exp(-1j * grid.k_squared * t / (2.0 * mass))


def _step_count(duration: float, dt: float) -> int:
    return max(1, int(math.ceil(duration / dt - 1e-9)))


class _Integrator:
    """Holds the per-run multipliers of one EvolutionSpec."""

    def __init__(self, spec: EvolutionSpec, dt: float):
        self.spec = spec
        self.dt = dt
        self.grid = spec.grid
        self.kinetic = _kinetic_multiplier(spec.grid, spec.mass, dt)
        self._phases = {}

    def potential_phase(self, mu0: float) -> np.ndarray:
        if mu0 not in self._phases:
            self._phases[mu0] = np.exp(-0.5j * self.dt * mu0 * self.spec.potential)
        return self._phases[mu0]

    def local_derivative(self, values: np.ndarray, coefficients: CoefficientSet) -> np.ndarray:
        return -1j * local_rhs(values, self.grid, coefficients, self.spec.policy)

    def local_rk4(self, values: np.ndarray, h: float, coefficients: CoefficientSet) -> np.ndarray:
        k1 = self.local_derivative(values, coefficients)
        k2 = self.local_derivative(values + 0.5 * h * k1, coefficients)
        k3 = self.local_derivative(values + 0.5 * h * k2, coefficients)
        k4 = self.local_derivative(values + h * k3, coefficients)
        return values + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def strang_step(self, values: np.ndarray, t: float) -> np.ndarray:
        coefficients = self.spec.coefficients_at(t + 0.5 * self.dt)
        nonlinear = coefficients.has_functional_terms()
        phase = self.potential_phase(coefficients.mu0)

        if nonlinear:
            values = self.local_rk4(values, 0.5 * self.dt, coefficients)
        values = phase * values
        values = np.fft.ifftn(self.kinetic * np.fft.fftn(values))
        values = phase * values
        if nonlinear:
            values = self.local_rk4(values, 0.5 * self.dt, coefficients)
        return values

    def full_derivative(self, values: np.ndarray, t: float) -> np.ndarray:
        coefficients = self.spec.coefficients_at(t)
        kinetic = -laplacian(values, self.grid) / (2.0 * self.spec.mass)
        potential = coefficients.mu0 * self.spec.potential * values
        local = local_rhs(values, self.grid, coefficients, self.spec.policy)
        return -1j * (kinetic + potential + local)

    def rk4_step(self, values: np.ndarray, t: float) -> np.ndarray:
        h = self.dt
        k1 = self.full_derivative(values, t)
        k2 = self.full_derivative(values + 0.5 * h * k1, t + 0.5 * h)
        k3 = self.full_derivative(values + 0.5 * h * k2, t + 0.5 * h)
        k4 = self.full_derivative(values + h * k3, t + h)
        return values + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def step(self, values: np.ndarray, t: float) -> np.ndarray:
        if self.spec.scheme is Scheme.STRANG:
            return self.strang_step(values, t)
        return self.rk4_step(values, t)


def _prepare(psi: Wavefunction, spec: EvolutionSpec, t_final: float) -> float:
    require_finite(psi)
    if psi.grid != spec.grid:
        raise ShapeMismatchError(
            f"state on {psi.grid.describe()} but evolution on {spec.grid.describe()}"
        )
    duration = t_final - psi.time
    if duration < 0:
        raise DomainError(f"cannot propagate backwards from t={psi.time} to t={t_final}")
    spec.validate()
    return duration


def _l2(values: np.ndarray, grid: Grid) -> float:
    return math.sqrt(float(np.sum(np.abs(values) ** 2)) * grid.cell_volume)


def _check_blowup(
    values: np.ndarray,
    grid: Grid,
    t: float,
    step: int,
    initial_norm: float,
) -> Optional[BlowupDiagnostic]:
    from ..config import config

    if not np.all(np.isfinite(values)):
        return BlowupDiagnostic(t, BlowupTrigger.NAN, step, initial_norm, math.nan)
    current_norm = _l2(values, grid)
    if current_norm > config.BLOWUP_NORM_GROWTH * initial_norm:
        return BlowupDiagnostic(t, BlowupTrigger.NORM_GROWTH, step, initial_norm, current_norm)
    if float(np.max(np.abs(values))) > config.BLOWUP_AMPLITUDE:
        return BlowupDiagnostic(t, BlowupTrigger.OVERFLOW, step, initial_norm, current_norm)
    return None


def propagate_linear(psi: Wavefunction, spec: EvolutionSpec, t_final: float) -> Wavefunction:
    """
    Propagate under the linear Schroedinger equation up to time t_final.

    Raises:
        ConfigurationError: If spec carries nonlinear terms
        StabilityError: If dt does not resolve the kinetic phase
    """
    if not spec.is_linear:
        raise ConfigurationError("propagate_linear needs linear coefficients and no gauge schedule")
    duration = _prepare(psi, spec, t_final)
    if duration == 0:
        return psi.with_values(psi.values.copy())

    steps = _step_count(duration, spec.dt)
    integrator = _Integrator(spec, duration / steps)
    values = psi.values
    t = psi.time
    for _ in range(steps):
        values = integrator.strang_step(values, t)
        t += integrator.dt
    return Wavefunction(psi.grid, values, t_final)


def propagate_nonlinear(
    psi: Wavefunction,
    spec: EvolutionSpec,
    t_final: float,
    reference_norm: Optional[float] = None,
) -> Union[Wavefunction, BlowupDiagnostic]:
    """
    Propagate under the unified nonlinear family up to time t_final.

    Args:
        psi: Initial state (its time stamp is the start time)
        spec: Evolution conditions and numerics
        t_final: Absolute final time
        reference_norm: Norm the growth check compares against; defaults to
            the norm of psi. Pass the norm at the start of the whole run when
            propagating it segment by segment.

    Returns:
        Final Wavefunction, or a BlowupDiagnostic if the run stopped being
        finite, grew in norm past the configured factor or overflowed
    """
    duration = _prepare(psi, spec, t_final)
    if duration == 0:
        return psi.with_values(psi.values.copy())
    if reference_norm is not None and not (math.isfinite(reference_norm) and reference_norm > 0):
        raise ConfigurationError(f"reference norm must be positive, got {reference_norm}")

    steps = _step_count(duration, spec.dt)
    integrator = _Integrator(spec, duration / steps)
    initial_norm = reference_norm if reference_norm is not None else _l2(psi.values, psi.grid)
    values = psi.values
    t = psi.time
    logger.debug(f"Propagating {steps} {spec.scheme.value} steps of dt={integrator.dt:.3g} on {spec.grid.describe()}")

    for step in range(1, steps + 1):
        values = integrator.step(values, t)
        t += integrator.dt
        diagnostic = _check_blowup(values, psi.grid, t, step, initial_norm)
        if diagnostic is not None:
            logger.warning(f"Blow-up detected: {diagnostic.describe()}")
            return diagnostic
    return Wavefunction(psi.grid, values, t_final)


def propagate(psi: Wavefunction, spec: EvolutionSpec, t_final: float) -> Wavefunction:
    """Propagate with the matching integrator; blow-up raises BlowupError."""
    if spec.is_linear and spec.scheme is Scheme.STRANG:
        return propagate_linear(psi, spec, t_final)
    result = propagate_nonlinear(psi, spec, t_final)
    if isinstance(result, BlowupDiagnostic):
        raise BlowupError(result)
    return result


def free_propagate(psi: Wavefunction, mass: float, t: float) -> Wavefunction:
    """Exact free evolution by one Fourier multiplier, any t."""
    require_finite(psi)
    if not mass > 0:
        raise ConfigurationError(f"mass must be positive, got {mass}")
    if t == 0:
        return psi.with_values(psi.values.copy())
    multiplier = _kinetic_multiplier(psi.grid, mass, t)
    values = np.fft.ifftn(multiplier * np.fft.fftn(psi.values))
    return Wavefunction(psi.grid, values, psi.time + t)


def energy_expectation(psi: Wavefunction, spec: EvolutionSpec) -> float:
    """Re<psi| -lap/2m + mu0 V |psi> / ||psi||^2."""
    require_same_grid(psi, spec)
    transformed = np.abs(np.fft.fftn(psi.values)) ** 2
    kinetic = float(np.sum(spec.grid.k_squared * transformed) / np.sum(transformed)) / (2.0 * spec.mass)
    rho = np.abs(psi.values) ** 2
    potential = spec.coefficients.mu0 * float(np.sum(spec.potential * rho) / np.sum(rho))
    return kinetic + potential


def gaussian_width(psi: Wavefunction, axis: int = 0) -> float:
    """sqrt(2) times the standard deviation of the density along one axis."""
    rho = np.abs(psi.values) ** 2
    other_axes = tuple(a for a in range(psi.grid.dim) if a != axis)
    marginal = rho.sum(axis=other_axes) if other_axes else rho
    x = psi.grid.axes[axis]
    weights = marginal / marginal.sum()
    mean = float(np.sum(weights * x))
    variance = float(np.sum(weights * (x - mean) ** 2))
    return math.sqrt(2.0 * variance)


def centroid(psi: Wavefunction, axis: int = 0) -> float:
    rho = np.abs(psi.values) ** 2
    other_axes = tuple(a for a in range(psi.grid.dim) if a != axis)
    marginal = rho.sum(axis=other_axes) if other_axes else rho
    return float(np.sum(marginal * psi.grid.axes[axis]) / marginal.sum())


@dataclass
class ConvergenceReport:
    dts: List[float]
    errors: List[float]
    ratios: List[float]
    orders: List[float]

    def min_order(self) -> float:
        return min(self.orders) if self.orders else math.nan


def convergence_study(error_fn: Callable[[float], float], dts: Sequence[float]) -> ConvergenceReport:
    """
    Evaluate error_fn at each dt (largest first) and report successive ratios.

    Observed order between neighbours is log(e_i / e_{i+1}) / log(dt_i / dt_{i+1}).
    """
    dts = sorted((float(dt) for dt in dts), reverse=True)
    if len(dts) < 2:
        raise ConfigurationError("a convergence study needs at least two step sizes")
    errors = [float(error_fn(dt)) for dt in dts]
    ratios = []
    orders = []
    for (dt_a, e_a), (dt_b, e_b) in zip(zip(dts, errors), zip(dts[1:], errors[1:])):
        ratio = e_a / e_b if e_b > 0 else math.inf
        ratios.append(ratio)
        orders.append(math.log(ratio) / math.log(dt_a / dt_b) if 0 < ratio < math.inf else math.nan)
    logger.info(f"Convergence study: errors={errors} ratios={ratios}")
    return ConvergenceReport(dts, errors, ratios, orders)
