"""Nonlinear gauge transformations and equivalence certification."""
from .schedule import GaugeSchedule
from .transforms import (
    apply_gauge,
    invert_gauge,
    gauge_values,
    ProjectionSpec,
    IdentityProjection,
    RegionProjection,
    MaskProjection,
    band_limit,
    generalized_projection,
    GaugeMap,
    IdentityMap,
    PhaseGaugeMap,
    NonlinearGaugeMap,
)
from .equivalence import QuantumSystem, EquivalenceReport, check_topological_equivalence
from .histories import history_probability

__all__ = [
    'GaugeSchedule',
    'apply_gauge',
    'invert_gauge',
    'gauge_values',
    'ProjectionSpec',
    'IdentityProjection',
    'RegionProjection',
    'MaskProjection',
    'band_limit',
    'generalized_projection',
    'GaugeMap',
    'IdentityMap',
    'PhaseGaugeMap',
    'NonlinearGaugeMap',
    'QuantumSystem',
    'EquivalenceReport',
    'check_topological_equivalence',
    'history_probability',
]
