"""Effects, mixtures, momentum measures and signaling experiments."""
from .effects import Effect, central_cells, effect_family
from .mixtures import (
    Mixture,
    DensityMatrix,
    DistinguishabilityResult,
    density_matrix,
    effect_on_mixture,
    mixtures_distinguishable,
)
from .momentum import (
    AsymptoticMomentumResult,
    velocity_cone,
    clipping_fraction,
    asymptotic_momentum_probability,
    fourier_momentum_probability,
    momentum_observable,
)
from .signaling import (
    TwoParticleSpec,
    SignalingReport,
    schmidt_coefficients,
    is_entangled,
    marginal_probability,
    gisin_experiment,
    product_factors,
    factorization_residual,
)

__all__ = [
    'Effect',
    'central_cells',
    'effect_family',
    'Mixture',
    'DensityMatrix',
    'DistinguishabilityResult',
    'density_matrix',
    'effect_on_mixture',
    'mixtures_distinguishable',
    'AsymptoticMomentumResult',
    'velocity_cone',
    'clipping_fraction',
    'asymptotic_momentum_probability',
    'fourier_momentum_probability',
    'momentum_observable',
    'TwoParticleSpec',
    'SignalingReport',
    'schmidt_coefficients',
    'is_entangled',
    'marginal_probability',
    'gisin_experiment',
    'product_factors',
    'factorization_residual',
]
