import math

import numpy as np
import pytest

from src.gaugelab.core.errors import CapacityError, ConfigurationError, ShapeMismatchError
from src.gaugelab.core.grid import Grid, Region
from src.gaugelab.core.wavefunction import Wavefunction
from src.gaugelab.dynamics.coefficients import CoefficientSet
from src.gaugelab.dynamics.propagator import EvolutionSpec
from src.gaugelab.experiments.runner import unraveling_pair
from src.gaugelab.observables.effects import Effect, central_cells, effect_family
from src.gaugelab.observables.mixtures import (
    Mixture,
    density_matrix,
    effect_on_mixture,
    mixtures_distinguishable,
)


@pytest.fixture
def mixture_grid():
    return Grid.line(256, 32.0)


@pytest.fixture
def pair(mixture_grid):
    return unraveling_pair(mixture_grid, 1.2, 1.0)


class TestMixture:
    """Weighted ensembles."""

    def test_weights_must_sum_to_one(self, gaussian, random_state):
        with pytest.raises(ConfigurationError):
            Mixture(((0.5, gaussian), (0.4, random_state)))

    def test_weights_must_be_positive(self, gaussian, random_state):
        with pytest.raises(ConfigurationError):
            Mixture(((0.0, gaussian), (1.0, random_state)))

    def test_components_share_grid(self, gaussian):
        other = Wavefunction(Grid.line(128, 20.0), np.ones(128))

        with pytest.raises(ShapeMismatchError):
            Mixture(((0.5, gaussian), (0.5, other)))

    def test_empty_mixture(self):
        with pytest.raises(ConfigurationError):
            Mixture(())

    def test_merge(self, gaussian, random_state):
        merged = Mixture.pure(gaussian).merge(Mixture.pure(random_state), 0.25)

        assert merged.weights == [0.25, 0.75]
        assert merged.states[1] is random_state


class TestDensityMatrix:
    """Dense W of small mixtures."""

    def test_unravelings_share_density_matrix(self, pair):
        first, second = pair

        assert density_matrix(first).max_difference(density_matrix(second)) < 1e-12

    def test_trace_hermiticity_positivity(self, pair):
        w = density_matrix(pair[0])

        assert math.isclose(w.trace(), 1.0, rel_tol=1e-12)
        assert w.hermiticity_error() < 1e-15
        assert w.min_eigenvalue() > -1e-12

    def test_region_probability_matches_effect(self, pair):
        region = Region.interval(-2.0, 0.5)

        expected = effect_on_mixture(Effect(region), pair[0])

        assert math.isclose(density_matrix(pair[0]).region_probability(region), expected, rel_tol=1e-12)

    def test_unravel_reproduces_matrix(self):
        grid = Grid.line(32, 8.0)
        first, _ = unraveling_pair(grid, 1.2, 1.0)
        w = density_matrix(first)

        assert density_matrix(w.unravel()).max_difference(w) < 1e-10

    def test_capacity(self, pair):
        with pytest.raises(CapacityError):
            density_matrix(pair[0], max_points=64)


class TestDistinguishability:
    """Comparing mixtures through finite effect families."""

    def test_linear_effects_cannot_tell_unravelings_apart(self, mixture_grid, pair):
        spec = EvolutionSpec(grid=mixture_grid)
        effects = effect_family([(spec, d) for d in (0.0, 0.25, 0.5)], central_cells(mixture_grid))

        result = mixtures_distinguishable(*pair, effects, tol=1e-10)

        assert not result.distinguishable
        assert result.witness is None
        assert result.verdict == "indistinguishable"
        assert result.effect_count == 24
        assert "relative to 24 sampled effects" in result.describe()

    def test_nonlinear_effects_tell_unravelings_apart(self, mixture_grid, pair):
        spec = EvolutionSpec(grid=mixture_grid, coefficients=CoefficientSet(mu2=0.1))
        effects = effect_family([(spec, d) for d in (0.0, 0.25, 0.5)], central_cells(mixture_grid))

        result = mixtures_distinguishable(*pair, effects, tol=1e-3)

        assert result.distinguishable
        assert result.gap > 1e-3
        assert result.witness.duration > 0
        assert result.verdict == "distinguishable"

    def test_empty_family(self, pair):
        with pytest.raises(ConfigurationError):
            mixtures_distinguishable(*pair, [])
