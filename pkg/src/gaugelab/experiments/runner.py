"""Experiment dispatch: one handler per experiment kind."""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .. import __version__
from ..core.errors import BlowupError, ConfigurationError
from ..core.grid import Grid, Space
from ..core.wavefunction import Wavefunction, norm
from ..dynamics.coefficients import CoefficientSet, linearizable_coefficients
from ..dynamics.propagator import (
    BlowupDiagnostic,
    centroid,
    convergence_study,
    energy_expectation,
    gaussian_width,
    propagate_linear,
    propagate_nonlinear,
)
from ..gauge.transforms import NonlinearGaugeMap
from ..observables.effects import central_cells, effect_family
from ..observables.mixtures import Mixture, density_matrix, mixtures_distinguishable
from ..observables.momentum import asymptotic_momentum_probability, fourier_momentum_probability
from ..observables.signaling import factorization_residual, gisin_experiment
from .builders import (
    build_coefficients,
    build_evolution,
    build_grid,
    build_potential,
    build_region,
    build_schedule,
    build_state,
    build_two_particle,
    gaussian_values,
)
from .schemas import (
    ExperimentConfig,
    GaussianState,
    HarmonicPotential,
    ResultRecord,
    ZeroPotential,
    config_hash,
    content_digest,
)
from .writer import write_outputs

logger = logging.getLogger(__name__)

EXIT_CODES = {"pass": 0, "fail": 1, "blowup": 3}

# Statistic changes below this are round-off in dt studies
STATISTIC_NOISE_FLOOR = 1e-10

# Scalar reported per run in sweep summaries
PRIMARY_METRIC = {
    "linear_benchmark": "max_width_error",
    "linearizability": "max_residual",
    "momentum_cone": "max_final_deviation",
    "mixture_distinguishability": "nonlinear_gap",
    "gisin_signaling": "statistic",
    "blowup_scan": "blowup_time",
}


@dataclass
class ExperimentOutcome:
    verdict: str
    series: pd.DataFrame
    metrics: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    blowup: Optional[BlowupDiagnostic] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    @classmethod
    def blown_up(cls, diagnostic: BlowupDiagnostic, rows: List[dict], notes: Optional[List[str]] = None):
        return cls(
            verdict="blowup",
            series=pd.DataFrame(rows),
            metrics={"blowup_time": diagnostic.time_of_detection},
            notes=(notes or []) + [f"blow-up: {diagnostic.describe()}"],
            blowup=diagnostic,
        )


@dataclass
class RunResult:
    record: ResultRecord
    outcome: ExperimentOutcome
    paths: Dict[str, Path]

    @property
    def exit_code(self) -> int:
        return self.outcome.exit_code


HANDLERS: Dict[str, Callable[[ExperimentConfig], ExperimentOutcome]] = {}


def handler(kind: str):
    def register(fn):
        HANDLERS[kind] = fn
        return fn
    return register


def sample_times(config: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, config.time.t_final, config.time.samples + 1)


def _require_linear(coefficients: CoefficientSet, kind: str):
    if not coefficients.is_linear:
        raise ConfigurationError(f"{kind} runs with linear coefficients only (mu0 may differ from 1)")


@handler("linear_benchmark")
def run_linear_benchmark(config: ExperimentConfig) -> ExperimentOutcome:
    """Free/harmonic linear evolution against closed-form laws."""
    grid = build_grid(config.grid)
    coefficients = build_coefficients(config.coefficients)
    _require_linear(coefficients, config.kind)
    spec = build_evolution(config, grid, coefficients=coefficients)
    psi = build_state(config.state, grid, config.seed)
    mass = config.time.mass
    state = config.state

    gaussian = isinstance(state, GaussianState)
    free_width = gaussian and isinstance(config.potential, ZeroPotential)
    coherent = gaussian and isinstance(config.potential, HarmonicPotential)
    if coherent:
        omega = config.potential.omega * math.sqrt(abs(coefficients.mu0))

    initial_norm = norm(psi)
    rows = []
    for t in sample_times(config):
        if t > 0:
            psi = propagate_linear(psi, spec, t)
        width_reference = math.nan
        centroid_reference = math.nan
        if free_width:
            width_reference = state.width * math.sqrt(1.0 + (t / (mass * state.width ** 2)) ** 2)
        if coherent:
            x0 = state.center - config.potential.center
            centroid_reference = (
                config.potential.center
                + x0 * math.cos(omega * t)
                + state.carrier / (mass * omega) * math.sin(omega * t)
            )
        current_norm = norm(psi)
        rows.append({
            "t": float(t),
            "norm": current_norm,
            "norm_drift": abs(current_norm - initial_norm),
            "width": gaussian_width(psi),
            "width_reference": width_reference,
            "centroid": centroid(psi),
            "centroid_reference": centroid_reference,
            "energy": energy_expectation(psi, spec),
        })

    series = pd.DataFrame(rows)
    steps = max(1, int(round(config.time.t_final / config.time.dt)))
    metrics = {
        "max_norm_drift": float(series["norm_drift"].max()),
        "steps": float(steps),
        "max_width_error": math.nan,
        "max_centroid_error": math.nan,
    }
    passed = metrics["max_norm_drift"] <= config.tolerances.norm * max(1.0, steps / 1000.0)
    if free_width:
        errors = (series["width"] - series["width_reference"]).abs() / series["width_reference"]
        metrics["max_width_error"] = float(errors.max())
        passed = passed and metrics["max_width_error"] <= config.tolerances.width_rel
    if coherent:
        errors = (series["centroid"] - series["centroid_reference"]).abs()
        metrics["max_centroid_error"] = float(errors.max())
        passed = passed and metrics["max_centroid_error"] <= config.tolerances.centroid
    return ExperimentOutcome("pass" if passed else "fail", series, metrics)


@handler("linearizability")
def run_linearizability(config: ExperimentConfig) -> ExperimentOutcome:
    """Nonlinear run with gauge-dictionary coefficients against N o linear o N^-1."""
    grid = build_grid(config.grid)
    base = build_coefficients(config.coefficients)
    _require_linear(base, config.kind)
    schedule = build_schedule(config.gauge)
    section = config.linearizability or _default_linearizability()
    psi0 = build_state(config.state, grid, config.seed)
    notes = []

    nonlinear_base = base
    if section.perturb is not None:
        dictionary = linearizable_coefficients(schedule.gamma(0.0), schedule.gamma_dot(0.0), config.time.mass)
        delta = section.perturbation * getattr(dictionary, section.perturb)
        if delta == 0.0:
            notes.append(f"{section.perturb} vanishes in the dictionary; perturbation has no effect")
        nonlinear_base = replace(base, **{section.perturb: delta})

    linear_spec = build_evolution(config, grid, coefficients=base)
    nonlinear_spec = build_evolution(config, grid, coefficients=nonlinear_base, schedule=schedule)
    gauge_map = NonlinearGaugeMap(schedule, nonlinear_spec.policy)
    initial_norm = norm(psi0)
    times = sample_times(config)

    def residual_run(linear, nonlinear, record: bool):
        rows = []
        psi_linear = gauge_map.inverse(psi0, 0.0)
        psi_nonlinear = psi0
        for t in times[1:]:
            psi_linear = propagate_linear(psi_linear, linear, t)
            result = propagate_nonlinear(psi_nonlinear, nonlinear, t, reference_norm=initial_norm)
            if isinstance(result, BlowupDiagnostic):
                return rows, result
            psi_nonlinear = result
            reference = gauge_map.forward(psi_linear, t)
            residual = norm(psi_nonlinear.with_values(psi_nonlinear.values - reference.values)) / initial_norm
            if record:
                rows.append({
                    "t": float(t),
                    "gamma": schedule.gamma(t),
                    "residual": residual,
                    "norm": norm(psi_nonlinear),
                    "norm_drift": abs(norm(psi_nonlinear) - initial_norm),
                })
            else:
                rows.append({"t": float(t), "residual": residual})
        return rows, None

    rows, blowup = residual_run(linear_spec, nonlinear_spec, record=True)
    if blowup is not None:
        return ExperimentOutcome.blown_up(blowup, rows, notes)

    series = pd.DataFrame(rows)
    metrics = {
        "max_residual": float(series["residual"].max()),
        "final_residual": float(series["residual"].iloc[-1]),
        "max_norm_drift": float(series["norm_drift"].max()),
    }

    if section.perturb is not None:
        passed = metrics["max_residual"] > config.tolerances.sensitivity
        notes.append(f"sensitivity check: {section.perturb} perturbed by {section.perturbation:+.0%}")
    else:
        passed = metrics["max_residual"] <= config.tolerances.residual

    if section.convergence_dts:
        def final_residual(dt: float) -> float:
            study_rows, study_blowup = residual_run(linear_spec.with_dt(dt), nonlinear_spec.with_dt(dt), False)
            if study_blowup is not None:
                raise BlowupError(study_blowup)
            return study_rows[-1]["residual"]

        try:
            study = convergence_study(final_residual, section.convergence_dts)
        except BlowupError as e:
            notes.append("convergence study stopped by a blow-up")
            return ExperimentOutcome.blown_up(e.diagnostic, rows, notes)
        for index, (dt, error) in enumerate(zip(study.dts, study.errors)):
            metrics[f"residual_dt_{index}"] = error
            metrics[f"dt_{index}"] = dt
        for index, ratio in enumerate(study.ratios):
            metrics[f"ratio_{index}"] = ratio
        in_window = all(
            config.tolerances.order_ratio_min <= r <= config.tolerances.order_ratio_max for r in study.ratios
        )
        if not in_window:
            notes.append(f"residual ratios {study.ratios} outside the second-order window")
        passed = passed and in_window

    return ExperimentOutcome("pass" if passed else "fail", series, metrics, notes)


def _default_linearizability():
    from .schemas import LinearizabilitySection
    return LinearizabilitySection()


@handler("momentum_cone")
def run_momentum_cone(config: ExperimentConfig) -> ExperimentOutcome:
    """Velocity-cone probabilities against the Fourier momentum measure."""
    section = config.momentum
    mass = config.time.mass
    grid = build_grid(config.grid)
    notes = []
    if section.cone_grid:
        grid = Grid.for_velocity_cone(grid.points[0], section.times[-1], mass)
        notes.append(f"box length set to {grid.lengths[0]:.6g} for cell-aligned cones")
    if not isinstance(config.potential, ZeroPotential):
        notes.append("potential ignored: momentum is measured through free evolution")
    psi = build_state(config.state, grid, config.seed)

    rows = []
    final_deviations = []
    approaching = True
    for index, interval in enumerate(section.regions):
        region = build_region(interval, Space.MOMENTUM)
        result = asymptotic_momentum_probability(psi, region, mass, section.times)
        reference = fourier_momentum_probability(psi, region)
        deviations = result.deviations(reference)
        for t, p, d in zip(result.times, result.probabilities, deviations):
            rows.append({
                "region": index,
                "lo": interval.lo,
                "hi": interval.hi,
                "t": t,
                "cone_probability": p,
                "fourier_probability": reference,
                "deviation": d,
            })
        final_deviations.append(deviations[-1])
        approaching = approaching and deviations[-1] <= deviations[0] + 1e-12
        if not result.monotone:
            notes.append(f"region {index}: cone sequence is not monotone")

    metrics = {
        "max_final_deviation": max(final_deviations),
        "box_length": grid.lengths[0],
    }
    passed = metrics["max_final_deviation"] <= config.tolerances.momentum and approaching
    if not approaching:
        notes.append("cone estimates do not approach the Fourier values")
    return ExperimentOutcome("pass" if passed else "fail", pd.DataFrame(rows), metrics, notes)


def unraveling_pair(grid: Grid, offset: float, width: float):
    """
    Two mixtures with one density matrix: {a, b} and {(a + ib)/sqrt2, (a - ib)/sqrt2}
    for real Gaussians a, b at -offset and +offset. Every component is nodeless.
    """
    x = grid.axes[0]
    a = Wavefunction(grid, gaussian_values(x, -offset, width)).normalized()
    b = Wavefunction(grid, gaussian_values(x, offset, width)).normalized()
    plus = a.with_values((a.values + 1j * b.values) / math.sqrt(2.0))
    minus = a.with_values((a.values - 1j * b.values) / math.sqrt(2.0))
    first = Mixture(((0.5, a), (0.5, b)))
    second = Mixture(((0.5, plus), (0.5, minus)))
    return first, second


@handler("mixture_distinguishability")
def run_mixture_distinguishability(config: ExperimentConfig) -> ExperimentOutcome:
    """Two unravelings of one density matrix under linear and nonlinear effect families."""
    from ..config import config as lab_config

    section = config.mixture or _default_mixture()
    grid = build_grid(config.grid)
    first, second = unraveling_pair(grid, section.offset, section.width)
    regions = central_cells(grid, section.cells, section.fraction)
    coefficients = build_coefficients(config.coefficients)
    notes = ["mixture components built from the [mixture] section"]
    metrics = {}

    if grid.size <= lab_config.MAX_DENSITY_MATRIX_POINTS:
        metrics["density_matrix_difference"] = density_matrix(first).max_difference(density_matrix(second))

    families = [("linear", CoefficientSet(mu0=coefficients.mu0))]
    if not coefficients.is_linear:
        families.append(("nonlinear", coefficients))

    rows = []
    results = {}
    for family, family_coefficients in families:
        spec = build_evolution(config, grid, coefficients=family_coefficients)
        effects = effect_family([(spec, d) for d in section.durations], regions)
        tolerance = config.tolerances.indistinguishable if family == "linear" else config.tolerances.distinguishable
        try:
            result = mixtures_distinguishable(first, second, effects, tolerance)
        except BlowupError as e:
            return ExperimentOutcome.blown_up(e.diagnostic, rows, notes)
        results[family] = result
        for effect, (p1, p2) in zip(effects, result.values):
            box = effect.region.boxes[0][0]
            rows.append({
                "family": family,
                "duration": effect.duration,
                "lo": box[0],
                "hi": box[1],
                "p_first": p1,
                "p_second": p2,
                "gap": abs(p1 - p2),
            })
        notes.append(f"{family}: {result.describe()}")

    metrics["linear_gap"] = results["linear"].gap
    metrics["nonlinear_gap"] = results["nonlinear"].gap if "nonlinear" in results else math.nan
    passed = not results["linear"].distinguishable
    if "nonlinear" in results:
        passed = passed and results["nonlinear"].distinguishable
    return ExperimentOutcome("pass" if passed else "fail", pd.DataFrame(rows), metrics, notes)


def _default_mixture():
    from .schemas import MixtureSection
    return MixtureSection()


@handler("gisin_signaling")
def run_gisin_signaling(config: ExperimentConfig) -> ExperimentOutcome:
    """Remote-potential dependence of particle-1 marginals."""
    section = config.signaling
    grid = build_grid(config.grid)
    spec = build_two_particle(config, grid)
    remotes = [build_potential(p, grid.axes[1], config.time.mass) for p in section.remote]
    regions = [build_region(r) for r in section.regions]
    notes = []

    report = gisin_experiment(spec, remotes, section.t, regions)
    if report.blew_up:
        return ExperimentOutcome.blown_up(report.blowup, [], notes)

    rows = []
    for variant, probabilities in enumerate(report.probabilities):
        for index, (interval, p) in enumerate(zip(section.regions, probabilities)):
            rows.append({
                "variant": variant,
                "region": index,
                "lo": interval.lo,
                "hi": interval.hi,
                "probability": p,
                "deviation": abs(p - report.probabilities[0][index]),
            })
    metrics = {"statistic": report.statistic, "entangled": float(report.entangled)}

    if spec.coefficients.is_linear:
        passed = report.statistic <= config.tolerances.signaling
    elif not report.entangled:
        passed = report.statistic <= config.tolerances.product_signaling
        if section.check_factorization:
            try:
                metrics["factorization_residual"] = factorization_residual(spec, section.t)
            except BlowupError as e:
                notes.append("factorization check stopped by a blow-up")
                return ExperimentOutcome.blown_up(e.diagnostic, rows, notes)
            passed = passed and metrics["factorization_residual"] <= config.tolerances.factorization
    else:
        passed = True
        notes.append("entangled state under nonlinear coefficients: statistic is measured, not bounded")

    study_statistics = []
    for index, dt in enumerate(sorted(section.convergence_dts, reverse=True)):
        study = gisin_experiment(spec.with_dt(dt), remotes, section.t, regions)
        if study.blew_up:
            notes.append(f"dt={dt:g}: {study.blowup.describe()}")
            passed = False
            continue
        metrics[f"dt_{index}"] = dt
        metrics[f"statistic_dt_{index}"] = study.statistic
        study_statistics.append(study.statistic)

    if len(study_statistics) >= 3:
        drifts = [abs(a - b) for a, b in zip(study_statistics, study_statistics[1:])]
        metrics["statistic_drift"] = drifts[-1]
        if drifts[-1] > max(drifts[-2], STATISTIC_NOISE_FLOOR):
            notes.append(f"statistic does not settle as dt shrinks (drifts {drifts})")
            passed = False

    return ExperimentOutcome("pass" if passed else "fail", pd.DataFrame(rows), metrics, notes)


@handler("blowup_scan")
def run_blowup_scan(config: ExperimentConfig) -> ExperimentOutcome:
    """Propagate until the blow-up diagnostic fires or t_final is reached."""
    grid = build_grid(config.grid)
    spec = build_evolution(config, grid, schedule=build_schedule(config.gauge))
    psi = build_state(config.state, grid, config.seed)
    expect = config.blowup.expect_blowup if config.blowup else True

    initial_norm = norm(psi)
    rows = []
    for t in sample_times(config):
        if t > 0:
            result = propagate_nonlinear(psi, spec, t, reference_norm=initial_norm)
            if isinstance(result, BlowupDiagnostic):
                return ExperimentOutcome.blown_up(result, rows)
            psi = result
        rows.append({"t": float(t), "norm": norm(psi), "max_amplitude": float(np.max(np.abs(psi.values)))})

    notes = [] if not expect else ["no blow-up detected up to t_final"]
    metrics = {"blowup_time": math.nan, "final_norm": rows[-1]["norm"]}
    return ExperimentOutcome("fail" if expect else "pass", pd.DataFrame(rows), metrics, notes)


def run_experiment(config: ExperimentConfig) -> ExperimentOutcome:
    logger.info(f"Running {config.kind} experiment '{config.name}'")
    return HANDLERS[config.kind](config)


def execute(config: ExperimentConfig, raw: bytes, output_dir: Path) -> RunResult:
    """Run one experiment and write its result files atomically."""
    started = time.perf_counter()
    outcome = run_experiment(config)
    duration = time.perf_counter() - started

    record = ResultRecord(
        name=config.name,
        kind=config.kind,
        verdict=outcome.verdict,
        config_hash=config_hash(config),
        input_digest=content_digest(raw),
        seed=config.seed,
        metrics=outcome.metrics,
        notes=outcome.notes,
        blowup=None if outcome.blowup is None else {
            "time_of_detection": outcome.blowup.time_of_detection,
            "trigger": outcome.blowup.trigger.value,
            "step": outcome.blowup.step,
        },
        series_columns=list(outcome.series.columns),
        duration_seconds=duration,
        created_at=datetime.now(timezone.utc).isoformat(),
        version=__version__,
    )
    paths = write_outputs(record, outcome.series, output_dir, config.stem)
    logger.info(f"{config.name}: {outcome.verdict} in {duration:.2f}s")
    return RunResult(record, outcome, paths)
