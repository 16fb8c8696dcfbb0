"""Build grids, states, potentials and evolutions from validated configs."""
import logging
import math
from typing import Optional

import numpy as np
from scipy.special import eval_hermite

from ..core.errors import ConfigurationError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction
from ..dynamics.coefficients import CoefficientSet
from ..dynamics.propagator import EvolutionSpec, Scheme
from ..functionals.fields import NodeFloorPolicy
from ..gauge.schedule import GaugeSchedule
from ..observables.signaling import TwoParticleSpec
from .schemas import (
    CoefficientsConfig,
    ExperimentConfig,
    GaugeConfig,
    GaussianState,
    GridConfig,
    HarmonicPotential,
    HermiteState,
    Interval,
    LinearRampPotential,
    PlaneWaveState,
    RandomState,
    SquareWellPotential,
    SuperpositionState,
    TablePotential,
    TwoParticleState,
    ZeroPotential,
)

logger = logging.getLogger(__name__)


def build_grid(cfg: GridConfig) -> Grid:
    return Grid(tuple(cfg.points), tuple(cfg.lengths))


def gaussian_values(x: np.ndarray, center: float, width: float, carrier: float = 0.0) -> np.ndarray:
    """exp(-(x - x0)^2 / (2 sigma^2)) exp(i k0 x)."""
    return np.exp(-((x - center) ** 2) / (2.0 * width ** 2)) * np.exp(1j * carrier * x)


def snap_carrier(grid: Grid, carrier: float) -> float:
    """Nearest wavenumber the grid resolves exactly."""
    dk = grid.momentum_spacing[0]
    snapped = round(carrier / dk) * dk
    if not math.isclose(snapped, carrier, rel_tol=1e-12, abs_tol=1e-12):
        logger.info(f"Plane-wave carrier {carrier:g} snapped to grid wavenumber {snapped:.12g}")
    return snapped


def _single_state_values(cfg, grid: Grid, seed: int) -> np.ndarray:
    x = grid.axes[0]
    if isinstance(cfg, GaussianState):
        return gaussian_values(x, cfg.center, cfg.width, cfg.carrier)
    if isinstance(cfg, PlaneWaveState):
        return np.exp(1j * snap_carrier(grid, cfg.carrier) * x)
    if isinstance(cfg, HermiteState):
        u = (x - cfg.center) / cfg.width
        return eval_hermite(cfg.order, u) * np.exp(-0.5 * u ** 2)
    if isinstance(cfg, RandomState):
        rng = np.random.default_rng(seed)
        k = grid.wavenumbers[0]
        spectrum = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) * np.exp(
            -0.5 * (k / cfg.bandwidth) ** 2
        )
        return np.fft.ifft(spectrum) * np.exp(-0.5 * (x / cfg.envelope) ** 2)
    raise ConfigurationError(f"unsupported state family {type(cfg).__name__}")


def build_state(cfg, grid: Grid, seed: int = 0) -> Wavefunction:
    """Normalized initial state for any configured family."""
    if isinstance(cfg, TwoParticleState):
        values = two_particle_values(cfg, grid)
    elif isinstance(cfg, SuperpositionState):
        values = np.zeros(grid.shape, dtype=complex)
        for index, component in enumerate(cfg.components):
            amplitude = complex(*component.amplitude)
            values = values + amplitude * _single_state_values(component.state, grid, seed + index)
    else:
        if grid.dim != 1:
            raise ConfigurationError("single-particle families need a 1D grid")
        values = _single_state_values(cfg, grid, seed)

    psi = Wavefunction(grid, values)
    if not np.any(psi.values):
        raise ConfigurationError("configured initial state vanishes on the grid")
    return psi.normalized()


def two_particle_values(cfg: TwoParticleState, grid: Grid) -> np.ndarray:
    x1, x2 = grid.coordinates()
    half = 0.5 * cfg.separation
    left_1 = gaussian_values(x1, -half, cfg.width, cfg.carrier)
    right_2 = gaussian_values(x2, half, cfg.width, -cfg.carrier)
    if cfg.mode == "product":
        return left_1 * right_2
    right_1 = gaussian_values(x1, half, cfg.width, -cfg.carrier)
    left_2 = gaussian_values(x2, -half, cfg.width, cfg.carrier)
    return left_1 * right_2 + right_1 * left_2


def build_potential(cfg, x: np.ndarray, mass: float = 1.0) -> np.ndarray:
    """Potential sampled on one axis; harmonic wells are 0.5 m omega^2 (x - c)^2."""
    if isinstance(cfg, ZeroPotential):
        return np.zeros_like(x)
    if isinstance(cfg, HarmonicPotential):
        return 0.5 * mass * cfg.omega ** 2 * (x - cfg.center) ** 2
    if isinstance(cfg, SquareWellPotential):
        return np.where(np.abs(x - cfg.center) < 0.5 * cfg.width, -cfg.depth, 0.0)
    if isinstance(cfg, LinearRampPotential):
        return cfg.slope * (x - cfg.center)
    if isinstance(cfg, TablePotential):
        xs = [p for p, _ in cfg.points]
        vs = [v for _, v in cfg.points]
        return np.interp(x, xs, vs)
    raise ConfigurationError(f"unsupported potential {type(cfg).__name__}")


def build_coefficients(cfg: CoefficientsConfig) -> CoefficientSet:
    return CoefficientSet(**cfg.model_dump())


def build_schedule(cfg: Optional[GaugeConfig]) -> Optional[GaugeSchedule]:
    if cfg is None:
        return None
    if cfg.gamma is not None:
        return GaugeSchedule.constant(cfg.gamma)
    return GaugeSchedule.piecewise_linear(cfg.breakpoints)


def build_policy(config: ExperimentConfig) -> NodeFloorPolicy:
    """Per-experiment node floor, else LAB_NODE_FLOOR."""
    if config.time.node_floor is not None:
        return NodeFloorPolicy(config.time.node_floor)
    return NodeFloorPolicy.from_config()


def build_evolution(
    config: ExperimentConfig,
    grid: Grid,
    coefficients: Optional[CoefficientSet] = None,
    schedule: Optional[GaugeSchedule] = None,
    potential: Optional[np.ndarray] = None,
) -> EvolutionSpec:
    """EvolutionSpec for a 1D experiment; defaults come from the config."""
    if potential is None:
        potential = build_potential(config.potential, grid.axes[0], config.time.mass)
    return EvolutionSpec(
        grid=grid,
        potential=potential,
        coefficients=coefficients if coefficients is not None else build_coefficients(config.coefficients),
        mass=config.time.mass,
        dt=config.time.dt,
        scheme=Scheme(config.time.scheme),
        gauge_schedule=schedule,
        policy=build_policy(config),
    )


def build_two_particle(config: ExperimentConfig, grid: Grid) -> TwoParticleSpec:
    section = config.signaling
    return TwoParticleSpec(
        grid=grid,
        potential_1=build_potential(config.potential, grid.axes[0], config.time.mass),
        potential_2=build_potential(section.reference, grid.axes[1], config.time.mass),
        initial=build_state(config.state, grid, config.seed),
        coefficients=build_coefficients(config.coefficients),
        mass=config.time.mass,
        dt=config.time.dt,
        scheme=Scheme(config.time.scheme),
        policy=build_policy(config),
    )


def build_region(interval: Interval, space: Space = Space.POSITION) -> Region:
    return Region.interval(interval.lo, interval.hi, space)
