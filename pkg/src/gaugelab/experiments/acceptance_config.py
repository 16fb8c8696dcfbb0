"""Acceptance suite thresholds and problem sizes."""
from dataclasses import dataclass, field
from typing import List, Tuple


@dataclass
class AcceptanceConfig:
    """Numeric criteria for `verify`."""

    seed: int = 20240601

    # Linear correctness
    linear_points: int = 512
    linear_length: float = 40.0
    linear_t_final: float = 2.0
    width_rel_tol: float = 1e-6
    norm_drift_per_kstep: float = 1e-12

    # Gauge maps and generalized projections
    gauge_points: int = 256
    gauge_length: float = 20.0
    gauge_modulus_tol: float = 1e-12
    gauge_composition_tol: float = 1e-12
    born_invariance_tol: float = 1e-12
    born_triples: int = 32
    projection_triples: int = 16
    idempotency_tol: float = 1e-10

    # Linearizability and perturbation sensitivity
    linearizable_points: int = 512
    linearizable_length: float = 32.0
    linearizable_t: float = 0.5
    linearizable_dt: float = 1e-3
    constant_gammas: List[float] = field(default_factory=lambda: [0.2, 0.4, 0.8])
    gamma_breakpoints: List[Tuple[float, float]] = field(
        default_factory=lambda: [(0.0, 0.2), (0.25, 0.6), (0.5, 0.4)]
    )
    residual_tol: float = 1e-4
    convergence_dts: List[float] = field(default_factory=lambda: [1e-3, 5e-4, 2.5e-4])
    # Floor low enough that the floored tails stay below the dt error
    linearizable_floor: float = 1e-16
    order_ratio_min: float = 2.8
    order_ratio_max: float = 5.5
    sensitivity_gamma: float = 0.4
    perturbation: float = 0.1
    sensitivity_tol: float = 1e-3

    # Velocity-cone momentum
    cone_points: int = 1024
    cone_times: List[float] = field(default_factory=lambda: [10.0, 20.0, 30.0, 40.0, 50.0])
    cone_carriers: List[float] = field(default_factory=lambda: [0.0, 1.0, -0.8])
    cone_width: float = 1.5
    cone_regions: List[Tuple[float, float]] = field(
        default_factory=lambda: [(float("-inf"), 0.0), (0.0, 1.0), (1.0, float("inf")), (-1.0, 0.5)]
    )
    momentum_tol: float = 2e-3

    # Mixture dichotomy
    mixture_points: int = 256
    mixture_length: float = 32.0
    mixture_mu2: float = 0.1
    mixture_t: float = 0.5
    indistinguishable_tol: float = 1e-10
    distinguishable_tol: float = 1e-3

    # Signaling dichotomy
    signaling_points: int = 128
    signaling_length: float = 24.0
    signaling_t: float = 0.5
    signaling_mu2: float = 0.1
    signaling_dt: float = 1e-3
    signaling_dts: List[float] = field(default_factory=lambda: [2e-3, 1e-3, 5e-4])
    linear_signaling_tol: float = 1e-10
    product_signaling_tol: float = 1e-6
    factorization_tol: float = 1e-5

    # Functional correctness
    functional_points: int = 256
    functional_length: float = 20.0
    functional_window: float = 3.0
    functional_tol: float = 1e-8

    @classmethod
    def quick(cls) -> "AcceptanceConfig":
        """Reduced sizes for smoke runs; thresholds unchanged."""
        return cls(
            linear_points=256,
            linear_t_final=1.0,
            convergence_dts=[1e-3, 5e-4],
            born_triples=8,
            projection_triples=4,
            cone_points=512,
            signaling_dts=[],
        )
