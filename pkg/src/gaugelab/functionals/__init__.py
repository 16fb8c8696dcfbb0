"""Doebner-Goldin type functionals and the local nonlinear term."""
from .fields import (
    FunctionalId,
    NodeFloorPolicy,
    FunctionalFields,
    evaluate,
    local_rhs,
    nonlinear_rhs,
)

__all__ = [
    'FunctionalId',
    'NodeFloorPolicy',
    'FunctionalFields',
    'evaluate',
    'local_rhs',
    'nonlinear_rhs',
]
