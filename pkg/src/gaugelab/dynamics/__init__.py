"""Linear and nonlinear time evolution."""
from .coefficients import CoefficientSet, linearizable_coefficients
from .propagator import (
    Scheme,
    BlowupTrigger,
    BlowupDiagnostic,
    EvolutionSpec,
    ConvergenceReport,
    propagate_linear,
    propagate_nonlinear,
    propagate,
    free_propagate,
    energy_expectation,
    gaussian_width,
    centroid,
    convergence_study,
)

__all__ = [
    'CoefficientSet',
    'linearizable_coefficients',
    'Scheme',
    'BlowupTrigger',
    'BlowupDiagnostic',
    'EvolutionSpec',
    'ConvergenceReport',
    'propagate_linear',
    'propagate_nonlinear',
    'propagate',
    'free_propagate',
    'energy_expectation',
    'gaussian_width',
    'centroid',
    'convergence_study',
]
