"""Bundled acceptance suite behind `verify`."""
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.errors import BlowupError, ConfigurationError, LabError
from ..core.grid import Grid, Region, Space
from ..core.wavefunction import Wavefunction, born_probability, norm
from ..dynamics.coefficients import CoefficientSet, linearizable_coefficients
from ..dynamics.propagator import (
    BlowupDiagnostic,
    EvolutionSpec,
    convergence_study,
    gaussian_width,
    propagate_linear,
    propagate_nonlinear,
)
from ..functionals.fields import FunctionalId, NodeFloorPolicy, evaluate
from ..gauge.schedule import GaugeSchedule
from ..gauge.transforms import (
    MaskProjection,
    NonlinearGaugeMap,
    RegionProjection,
    apply_gauge,
    band_limit,
    generalized_projection,
)
from ..observables.effects import central_cells, effect_family
from ..observables.mixtures import density_matrix, mixtures_distinguishable
from ..observables.momentum import asymptotic_momentum_probability, fourier_momentum_probability
from ..observables.signaling import TwoParticleSpec, factorization_residual, gisin_experiment
from .acceptance_config import AcceptanceConfig
from .builders import gaussian_values
from .runner import STATISTIC_NOISE_FLOOR, unraveling_pair
from .writer import atomic_write_text, ensure_writable, series_to_csv

logger = logging.getLogger(__name__)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str
    metrics: Dict[str, float] = field(default_factory=dict)
    duration_seconds: float = 0.0


@dataclass
class VerificationReport:
    results: List[CriterionResult]
    paths: Dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


CRITERIA: Dict[str, Callable[[AcceptanceConfig], CriterionResult]] = {}


def criterion(name: str):
    def register(fn):
        CRITERIA[name] = fn
        return fn
    return register


def _max_abs(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


def _relative_l2(a: Wavefunction, b: Wavefunction) -> float:
    return norm(a.with_values(a.values - b.values)) / norm(b)


def _random_state(grid: Grid, rng: np.random.Generator) -> Wavefunction:
    """Band-limited random state under a Gaussian envelope."""
    k = grid.wavenumbers[0]
    spectrum = (rng.standard_normal(k.size) + 1j * rng.standard_normal(k.size)) * np.exp(-0.5 * (k / 3.0) ** 2)
    x = grid.axes[0]
    values = np.fft.ifft(spectrum) * np.exp(-0.5 * (x / (0.2 * grid.lengths[0])) ** 2)
    return Wavefunction(grid, values).normalized()


def _random_interval(grid: Grid, rng: np.random.Generator) -> Region:
    half = 0.5 * grid.lengths[0]
    lo, hi = np.sort(rng.uniform(-half, half, size=2))
    return Region.interval(float(lo), float(hi) + grid.spacing[0])


@criterion("linear_correctness")
def check_linear_correctness(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.line(acc.linear_points, acc.linear_length)
    spec = EvolutionSpec(grid=grid, dt=1e-3)
    sigma = 1.0
    psi = Wavefunction(grid, gaussian_values(grid.axes[0], 0.0, sigma)).normalized()
    initial_norm = norm(psi)

    worst_width = 0.0
    worst_drift = 0.0
    for t in np.linspace(0.0, acc.linear_t_final, 11)[1:]:
        psi = propagate_linear(psi, spec, float(t))
        reference = sigma * math.sqrt(1.0 + (t / sigma ** 2) ** 2)
        worst_width = max(worst_width, abs(gaussian_width(psi) - reference) / reference)
        worst_drift = max(worst_drift, abs(norm(psi) - initial_norm))

    steps = acc.linear_t_final / spec.dt
    drift_limit = acc.norm_drift_per_kstep * max(1.0, steps / 1000.0)
    passed = worst_width <= acc.width_rel_tol and worst_drift <= drift_limit
    return CriterionResult(
        "linear_correctness",
        passed,
        f"width error {worst_width:.2e} (tol {acc.width_rel_tol:g}), norm drift {worst_drift:.2e}",
        {"max_width_error": worst_width, "max_norm_drift": worst_drift},
    )


@criterion("gauge_properties")
def check_gauge_properties(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.line(acc.gauge_points, acc.gauge_length)
    rng = np.random.default_rng(acc.seed)
    policy = NodeFloorPolicy()
    modulus = composition = born = 0.0

    for _ in range(acc.born_triples):
        psi = _random_state(grid, rng)
        g1, g2 = rng.uniform(-2.0, 2.0, size=2)
        region = _random_interval(grid, rng)
        mapped = apply_gauge(psi, float(g1), policy)
        modulus = max(modulus, _max_abs(np.abs(mapped.values), np.abs(psi.values)))
        twice = apply_gauge(apply_gauge(psi, float(g2), policy), float(g1), policy)
        once = apply_gauge(psi, float(g1 + g2), policy)
        composition = max(composition, _max_abs(twice.values, once.values))
        born = max(born, abs(born_probability(mapped, region) - born_probability(psi, region)))

    passed = (
        modulus <= acc.gauge_modulus_tol
        and composition <= acc.gauge_composition_tol
        and born <= acc.born_invariance_tol
    )
    return CriterionResult(
        "gauge_properties",
        passed,
        f"modulus {modulus:.1e}, composition {composition:.1e}, Born {born:.1e} over {acc.born_triples} triples",
        {"modulus": modulus, "composition": composition, "born": born},
    )


def _linearizability_residual(
    acc: AcceptanceConfig,
    grid: Grid,
    psi0: Wavefunction,
    schedule: GaugeSchedule,
    coefficients: Optional[CoefficientSet],
    dt: float,
) -> float:
    """
    L2 residual between the nonlinear run and N . linear . N^-1 at t.

    With coefficients given they are used as is; otherwise the schedule
    supplies the dictionary at every step.
    """
    policy = NodeFloorPolicy(acc.linearizable_floor)
    linear = EvolutionSpec(grid=grid, dt=dt, policy=policy)
    if coefficients is None:
        nonlinear = EvolutionSpec(grid=grid, dt=dt, gauge_schedule=schedule, policy=policy)
    else:
        nonlinear = EvolutionSpec(grid=grid, dt=dt, coefficients=coefficients, policy=policy)
    gauge_map = NonlinearGaugeMap(schedule, policy)
    t = acc.linearizable_t

    evolved = propagate_nonlinear(psi0, nonlinear, t)
    if isinstance(evolved, BlowupDiagnostic):
        raise BlowupError(evolved)
    reference = gauge_map.forward(propagate_linear(gauge_map.inverse(psi0, 0.0), linear, t), t)
    return _relative_l2(evolved, reference)


def _linearizable_setup(acc: AcceptanceConfig):
    grid = Grid.line(acc.linearizable_points, acc.linearizable_length)
    psi0 = Wavefunction(grid, gaussian_values(grid.axes[0], -1.0, 1.0, carrier=1.0)).normalized()
    return grid, psi0


@criterion("linearizability")
def check_linearizability(acc: AcceptanceConfig) -> CriterionResult:
    grid, psi0 = _linearizable_setup(acc)
    metrics = {}
    failures = []

    cases = [(f"gamma={g:g}", GaugeSchedule.constant(g)) for g in acc.constant_gammas]
    cases.append(("gamma(t) piecewise", GaugeSchedule.piecewise_linear(acc.gamma_breakpoints)))

    for label, schedule in cases:
        if schedule.is_constant:
            coefficients = linearizable_coefficients(schedule.gamma(0.0), 0.0, 1.0)
        else:
            coefficients = None

        def residual(dt: float) -> float:
            return _linearizability_residual(acc, grid, psi0, schedule, coefficients, dt)

        value = residual(acc.linearizable_dt)
        metrics[label] = value
        if value > acc.residual_tol:
            failures.append(f"{label}: residual {value:.2e}")
            continue

        study = convergence_study(residual, acc.convergence_dts)
        for index, ratio in enumerate(study.ratios):
            metrics[f"{label} ratio_{index}"] = ratio
        if not all(acc.order_ratio_min <= r <= acc.order_ratio_max for r in study.ratios):
            failures.append(f"{label}: ratios {[round(r, 2) for r in study.ratios]}")

    worst = max(v for k, v in metrics.items() if "ratio" not in k)
    detail = "; ".join(failures) if failures else f"max residual {worst:.2e}, second-order ratios"
    return CriterionResult("linearizability", not failures, detail, metrics)


@criterion("perturbation_sensitivity")
def check_perturbation_sensitivity(acc: AcceptanceConfig) -> CriterionResult:
    grid, psi0 = _linearizable_setup(acc)
    gamma = acc.sensitivity_gamma
    schedule = GaugeSchedule.constant(gamma)
    dictionary = linearizable_coefficients(gamma, 0.0, 1.0)
    metrics = {}
    insensitive = []

    for name, value in dictionary.as_dict().items():
        if name == "mu0" or value == 0.0:
            continue
        perturbed = dictionary.perturbed(name, acc.perturbation)
        residual = _linearizability_residual(acc, grid, psi0, schedule, perturbed, acc.linearizable_dt)
        metrics[name] = residual
        if residual <= acc.sensitivity_tol:
            insensitive.append(name)

    detail = (
        f"no detectable change for {', '.join(insensitive)}"
        if insensitive
        else f"all {len(metrics)} nonzero coefficients detected (min residual {min(metrics.values()):.2e})"
    )
    return CriterionResult("perturbation_sensitivity", not insensitive, detail, metrics)


@criterion("velocity_cone")
def check_velocity_cone(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.for_velocity_cone(acc.cone_points, acc.cone_times[-1])
    worst = 0.0
    receding = []
    for carrier in acc.cone_carriers:
        psi = Wavefunction(grid, gaussian_values(grid.axes[0], 0.0, acc.cone_width, carrier)).normalized()
        for lo, hi in acc.cone_regions:
            region = Region.interval(lo, hi, Space.MOMENTUM)
            result = asymptotic_momentum_probability(psi, region, 1.0, acc.cone_times)
            deviations = result.deviations(fourier_momentum_probability(psi, region))
            worst = max(worst, deviations[-1])
            if deviations[-1] > deviations[0] + 1e-12:
                receding.append(f"k0={carrier:g} [{lo:g},{hi:g})")

    passed = worst <= acc.momentum_tol and not receding
    detail = f"max deviation at t={acc.cone_times[-1]:g}: {worst:.2e}"
    if receding:
        detail += f"; not approaching for {', '.join(receding)}"
    return CriterionResult("velocity_cone", passed, detail, {"max_deviation": worst})


@criterion("mixture_dichotomy")
def check_mixture_dichotomy(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.line(acc.mixture_points, acc.mixture_length)
    first, second = unraveling_pair(grid, 1.2, 1.0)
    w_difference = density_matrix(first).max_difference(density_matrix(second))
    regions = central_cells(grid)
    durations = [0.0, 0.5 * acc.mixture_t, acc.mixture_t]

    linear = EvolutionSpec(grid=grid)
    nonlinear = EvolutionSpec(grid=grid, coefficients=CoefficientSet(mu2=acc.mixture_mu2))
    linear_result = mixtures_distinguishable(
        first, second, effect_family([(linear, d) for d in durations], regions), acc.indistinguishable_tol
    )
    nonlinear_result = mixtures_distinguishable(
        first, second, effect_family([(nonlinear, d) for d in durations], regions), acc.distinguishable_tol
    )
    passed = not linear_result.distinguishable and nonlinear_result.distinguishable
    return CriterionResult(
        "mixture_dichotomy",
        passed,
        f"linear: {linear_result.describe()}; nonlinear: {nonlinear_result.describe()}",
        {
            "density_matrix_difference": w_difference,
            "linear_gap": linear_result.gap,
            "nonlinear_gap": nonlinear_result.gap,
        },
    )


def _two_particle(acc: AcceptanceConfig, entangled: bool, coefficients: CoefficientSet, dt: float) -> TwoParticleSpec:
    grid = Grid.plane(acc.signaling_points, acc.signaling_length)
    x1, x2 = grid.coordinates()
    values = gaussian_values(x1, -2.0, 1.0, 0.5) * gaussian_values(x2, 2.0, 1.0, -0.5)
    if entangled:
        values = values + gaussian_values(x1, 2.0, 1.0, -0.5) * gaussian_values(x2, -2.0, 1.0, 0.5)
    return TwoParticleSpec(
        grid=grid,
        potential_1=np.zeros_like(grid.axes[0]),
        potential_2=np.zeros_like(grid.axes[1]),
        initial=Wavefunction(grid, values).normalized(),
        coefficients=coefficients,
        dt=dt,
    )


@criterion("signaling_dichotomy")
def check_signaling_dichotomy(acc: AcceptanceConfig) -> CriterionResult:
    nonlinear = CoefficientSet(mu2=acc.signaling_mu2)
    x = Grid.line(acc.signaling_points, acc.signaling_length).axes[0]
    remotes = [0.125 * x ** 2, 0.3 * x]
    regions = [Region.interval(-math.inf, 0.0), Region.interval(0.0, math.inf), Region.interval(-3.0, -1.0)]
    t = acc.signaling_t
    metrics = {}
    failures = []

    linear = gisin_experiment(_two_particle(acc, True, CoefficientSet(), acc.signaling_dt), remotes, t, regions)
    metrics["linear_entangled"] = linear.statistic
    if not linear.statistic <= acc.linear_signaling_tol:
        failures.append(f"linear statistic {linear.statistic:.2e}")

    product_spec = _two_particle(acc, False, nonlinear, acc.signaling_dt)
    product = gisin_experiment(product_spec, remotes, t, regions)
    metrics["nonlinear_product"] = product.statistic
    metrics["factorization_residual"] = factorization_residual(product_spec, t)
    if not product.statistic <= acc.product_signaling_tol:
        failures.append(f"product-state statistic {product.statistic:.2e}")
    if metrics["factorization_residual"] > acc.factorization_tol:
        failures.append(f"factorization residual {metrics['factorization_residual']:.2e}")

    entangled = gisin_experiment(_two_particle(acc, True, nonlinear, acc.signaling_dt), remotes, t, regions)
    if entangled.blew_up:
        failures.append(f"entangled run blew up: {entangled.blowup.describe()}")
    else:
        metrics["nonlinear_entangled"] = entangled.statistic
        statistics = []
        for index, dt in enumerate(sorted(acc.signaling_dts, reverse=True)):
            study = gisin_experiment(_two_particle(acc, True, nonlinear, dt), remotes, t, regions)
            if study.blew_up:
                failures.append(f"entangled run at dt={dt:g} blew up: {study.blowup.describe()}")
                continue
            metrics[f"nonlinear_entangled_dt_{index}"] = study.statistic
            statistics.append(study.statistic)
        drifts = [abs(a - b) for a, b in zip(statistics, statistics[1:])]
        if len(drifts) >= 2 and drifts[-1] > max(drifts[-2], STATISTIC_NOISE_FLOOR):
            failures.append(f"entangled statistic does not settle as dt shrinks (drifts {drifts})")

    detail = "; ".join(failures) if failures else (
        f"linear {metrics['linear_entangled']:.1e}, product {metrics['nonlinear_product']:.1e}, "
        f"entangled {metrics.get('nonlinear_entangled', math.nan):.3e} (measured)"
    )
    return CriterionResult("signaling_dichotomy", not failures, detail, metrics)


@criterion("generalized_projections")
def check_generalized_projections(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.line(acc.gauge_points, acc.gauge_length)
    rng = np.random.default_rng(acc.seed + 1)
    policy = NodeFloorPolicy()
    idempotency = 0.0
    reduction = 0.0

    for index in range(acc.projection_triples):
        psi = _random_state(grid, rng)
        gamma = float(rng.uniform(-2.0, 2.0))
        if index % 3 == 0:
            projection = band_limit(*sorted(rng.uniform(-4.0, 4.0, size=2)))
        elif index % 3 == 1:
            projection = RegionProjection(_random_interval(grid, rng))
        else:
            projection = MaskProjection((rng.random(grid.shape) < 0.5).astype(float))

        once = generalized_projection(psi, projection, gamma, policy)
        if np.any(once.values):
            twice = generalized_projection(once, projection, gamma, policy)
            idempotency = max(idempotency, _relative_l2(twice, once))
        exact = psi.with_values(projection.apply(psi.values, grid))
        at_zero = generalized_projection(psi, projection, 0.0, policy)
        reduction = max(reduction, _max_abs(at_zero.values, exact.values))

    passed = idempotency <= acc.idempotency_tol and reduction == 0.0
    return CriterionResult(
        "generalized_projections",
        passed,
        f"idempotency {idempotency:.1e} over {acc.projection_triples} triples, gamma=0 reduction {reduction:.1e}",
        {"idempotency": idempotency, "reduction": reduction},
    )


@criterion("functional_correctness")
def check_functional_correctness(acc: AcceptanceConfig) -> CriterionResult:
    grid = Grid.line(acc.functional_points, acc.functional_length)
    x = grid.axes[0]
    inside = np.abs(x) <= acc.functional_window
    k = 3 * grid.momentum_spacing[0]

    # psi = exp(-x^2/2 + i k x): rho = exp(-x^2), J = k rho
    gaussian = Wavefunction(grid, np.exp(-0.5 * x ** 2 + 1j * k * x))
    gaussian_expected = {
        FunctionalId.R1: -2.0 * k * x,
        FunctionalId.R2: 4.0 * x ** 2 - 2.0,
        FunctionalId.R3: np.full_like(x, k ** 2),
        FunctionalId.R4: -2.0 * k * x,
        FunctionalId.R5: 4.0 * x ** 2,
        FunctionalId.LOG: -x ** 2,
    }
    plane = Wavefunction(grid, np.exp(1j * k * x))
    plane_expected = {
        FunctionalId.R1: np.zeros_like(x),
        FunctionalId.R2: np.zeros_like(x),
        FunctionalId.R3: np.full_like(x, k ** 2),
        FunctionalId.R4: np.zeros_like(x),
        FunctionalId.R5: np.zeros_like(x),
        FunctionalId.LOG: np.zeros_like(x),
    }

    metrics = {}
    for family, psi, expected in (("gaussian", gaussian, gaussian_expected), ("plane_wave", plane, plane_expected)):
        for functional, reference in expected.items():
            error = _max_abs(evaluate(functional, psi)[inside], reference[inside])
            metrics[f"{family} {functional.value}"] = error

    worst_name = max(metrics, key=metrics.get)
    passed = metrics[worst_name] <= acc.functional_tol
    return CriterionResult(
        "functional_correctness",
        passed,
        f"worst {worst_name}: {metrics[worst_name]:.1e} (tol {acc.functional_tol:g})",
        metrics,
    )


def run_verification(
    output_dir: Optional[Path] = None,
    only: Sequence[str] = (),
    quick: bool = False,
    acceptance: Optional[AcceptanceConfig] = None,
) -> VerificationReport:
    """
    Run the selected criteria (all by default) and write a summary.

    Raises:
        ConfigurationError: Unknown criterion name or unwritable output directory
    """
    unknown = [name for name in only if name not in CRITERIA]
    if unknown:
        raise ConfigurationError(f"unknown criteria {unknown}; choose from {list(CRITERIA)}")
    if output_dir is not None:
        output_dir = ensure_writable(output_dir)
    acc = acceptance or (AcceptanceConfig.quick() if quick else AcceptanceConfig())

    results = []
    for name, check in CRITERIA.items():
        if only and name not in only:
            continue
        logger.info(f"Criterion {name}")
        started = time.perf_counter()
        try:
            result = check(acc)
        except LabError as e:
            result = CriterionResult(name, False, f"{type(e).__name__}: {e}")
        result.duration_seconds = time.perf_counter() - started
        logger.info(f"{name}: {'pass' if result.passed else 'FAIL'} ({result.detail})")
        results.append(result)

    report = VerificationReport(results)
    if output_dir is not None:
        summary = pd.DataFrame(
            [
                {"criterion": r.name, "passed": r.passed, "duration_seconds": r.duration_seconds, "detail": r.detail}
                for r in results
            ]
        )
        report.paths["summary"] = atomic_write_text(output_dir / "verify_summary.csv", series_to_csv(summary))
    return report
