"""Sequential measurements with generalized projections."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.wavefunction import Wavefunction, squared_norm, require_finite
from ..core.errors import DegenerateStateError
from ..dynamics.propagator import EvolutionSpec, propagate
from ..functionals.fields import NodeFloorPolicy
from .transforms import ProjectionSpec, generalized_projection

logger = logging.getLogger(__name__)

HistoryStep = Tuple[float, ProjectionSpec]


def history_probability(
    psi: Wavefunction,
    spec: EvolutionSpec,
    steps: Sequence[HistoryStep],
    gamma: float,
    policy: Optional[NodeFloorPolicy] = None,
) -> float:
    """
    ||E_n T_n ... E_1 T_1 psi||^2 / ||psi||^2.

    Each step evolves for its duration under spec and then applies
    N_gamma . E_hat . N_gamma^-1. Once a projection annihilates the state
    the history has probability zero.
    """
    require_finite(psi)
    initial = squared_norm(psi)
    if initial == 0.0:
        raise DegenerateStateError("history of a zero-norm state")
    policy = policy or spec.policy

    state = psi
    for index, (duration, projection) in enumerate(steps):
        if duration > 0:
            state = propagate(state, spec, state.time + duration)
        state = generalized_projection(state, projection, gamma, policy)
        if not np.any(state.values):
            logger.debug(f"History annihilated at step {index} ({projection.describe()})")
            return 0.0
    return min(squared_norm(state) / initial, 1.0)
