import math

import numpy as np
import pytest

from src.gaugelab.core.errors import ConfigurationError, DegenerateStateError, ShapeMismatchError
from src.gaugelab.core.grid import Grid
from src.gaugelab.core.wavefunction import Wavefunction
from src.gaugelab.dynamics.coefficients import CoefficientSet
from src.gaugelab.functionals.fields import FunctionalId, NodeFloorPolicy, evaluate, nonlinear_rhs


@pytest.fixture
def moving_gaussian():
    """exp(-x^2/2 + ikx): rho = exp(-x^2), J = k rho."""
    grid = Grid.line(256, 20.0)
    x = grid.axes[0]
    k = 3 * grid.momentum_spacing[0]
    return Wavefunction(grid, np.exp(-0.5 * x ** 2 + 1j * k * x)), x, k


@pytest.mark.parametrize("functional,expected", [
    (FunctionalId.R1, lambda x, k: -2.0 * k * x),
    (FunctionalId.R2, lambda x, k: 4.0 * x ** 2 - 2.0),
    (FunctionalId.R3, lambda x, k: np.full_like(x, k ** 2)),
    (FunctionalId.R4, lambda x, k: -2.0 * k * x),
    (FunctionalId.R5, lambda x, k: 4.0 * x ** 2),
    (FunctionalId.LOG, lambda x, k: -x ** 2),
])
def test_functionals_of_moving_gaussian(moving_gaussian, functional, expected):
    """Test each functional against its closed form inside |x| <= 3."""
    psi, x, k = moving_gaussian
    inside = np.abs(x) <= 3.0

    values = evaluate(functional, psi)

    assert np.max(np.abs(values[inside] - expected(x, k)[inside])) < 1e-8


def test_plane_wave_functionals():
    """Test only R3 survives for a plane wave."""
    grid = Grid.line(128, 10.0)
    k = 2 * grid.momentum_spacing[0]
    psi = Wavefunction(grid, np.exp(1j * k * grid.axes[0]))

    assert np.allclose(evaluate(FunctionalId.R3, psi), k ** 2, atol=1e-10)
    for functional in (FunctionalId.R1, FunctionalId.R2, FunctionalId.R4, FunctionalId.R5, FunctionalId.LOG):
        assert np.max(np.abs(evaluate(functional, psi))) < 1e-10


def test_node_floor_caps_logarithm():
    """Test ln rho_eff at an exact node."""
    grid = Grid.line(64, 10.0)
    x = grid.axes[0]
    psi = Wavefunction(grid, x * np.exp(-0.5 * x ** 2))
    policy = NodeFloorPolicy(1e-12)
    node = int(np.flatnonzero(x == 0.0)[0])

    values = evaluate(FunctionalId.LOG, psi, policy)
    peak = float(np.max(np.abs(psi.values) ** 2))

    assert math.isclose(values[node], math.log(1e-12 * peak))
    assert np.all(np.isfinite(evaluate(FunctionalId.R5, psi, policy)))


@pytest.mark.parametrize("epsilon", [0.0, -1e-12, 1e-3])
def test_node_floor_range(epsilon):
    """Test epsilon_rel outside (0, 1e-6] is rejected."""
    with pytest.raises(ConfigurationError):
        NodeFloorPolicy(epsilon)


def test_effective_density():
    """Test the relative floor."""
    policy = NodeFloorPolicy(1e-6)
    rho = np.array([0.0, 1e-9, 0.5, 2.0])

    assert np.allclose(policy.effective_density(rho), [2e-6, 2e-6, 0.5, 2.0])
    assert policy.floored_fraction(rho) == 0.5
    with pytest.raises(DegenerateStateError):
        policy.effective_density(np.zeros(4))


def test_zero_state_rejected(line_grid):
    """Test functionals need a nonzero state."""
    psi = Wavefunction(line_grid, np.zeros(line_grid.shape))

    with pytest.raises(DegenerateStateError):
        evaluate(FunctionalId.R2, psi)
    with pytest.raises(DegenerateStateError):
        nonlinear_rhs(psi, CoefficientSet())


def test_linear_rhs_is_potential_term(gaussian):
    """Test linear coefficients leave mu0 V psi."""
    potential = 0.5 * gaussian.grid.axes[0] ** 2

    rhs = nonlinear_rhs(gaussian, CoefficientSet(mu0=2.0), potential)

    assert np.allclose(rhs, 2.0 * potential * gaussian.values)


def test_rhs_combines_terms(gaussian):
    """Test the family is linear in its coefficients."""
    policy = NodeFloorPolicy()
    first = nonlinear_rhs(gaussian, CoefficientSet(mu0=0.0, mu2=0.3), policy=policy)
    second = nonlinear_rhs(gaussian, CoefficientSet(mu0=0.0, nu2=0.2), policy=policy)
    both = nonlinear_rhs(gaussian, CoefficientSet(mu0=0.0, mu2=0.3, nu2=0.2), policy=policy)

    assert np.allclose(both, first + second)
    expected = 0.2j * evaluate(FunctionalId.R2, gaussian, policy) * gaussian.values
    assert np.allclose(second, expected)


def test_rhs_potential_shape(gaussian):
    """Test potential shape validation."""
    with pytest.raises(ShapeMismatchError):
        nonlinear_rhs(gaussian, CoefficientSet(), np.zeros(10))


@pytest.mark.parametrize("functional", [
    FunctionalId.R1, FunctionalId.R2, FunctionalId.R3, FunctionalId.R4, FunctionalId.R5,
])
def test_ratio_functionals_ignore_scale(moving_gaussian, functional):
    """Test R_k(c psi) = R_k(psi)."""
    psi, x, _ = moving_gaussian
    scaled = psi.with_values(2.5 * np.exp(0.7j) * psi.values)
    inside = np.abs(x) <= 3.0

    difference = evaluate(functional, scaled) - evaluate(functional, psi)

    assert np.max(np.abs(difference[inside])) < 1e-10


def test_logarithm_shifts_under_scale(moving_gaussian):
    """Test ln rho_eff(c psi) = ln rho_eff(psi) + ln|c|^2, floored cells included."""
    psi, _, _ = moving_gaussian
    c = 2.5 * np.exp(0.7j)

    shift = evaluate(FunctionalId.LOG, psi.with_values(c * psi.values)) - evaluate(FunctionalId.LOG, psi)

    assert np.max(np.abs(shift - math.log(abs(c) ** 2))) < 1e-10


@pytest.mark.parametrize("functional", list(FunctionalId))
def test_halving_floor_only_touches_low_density_cells(moving_gaussian, functional):
    """Test cells with rho >= 2 (epsilon / 2) max(rho) keep their values."""
    psi, _, _ = moving_gaussian
    epsilon = 1e-8
    rho = np.abs(psi.values) ** 2
    kept = rho >= epsilon * rho.max()

    coarse = evaluate(functional, psi, NodeFloorPolicy(epsilon))
    fine = evaluate(functional, psi, NodeFloorPolicy(0.5 * epsilon))

    assert not kept.all()
    assert np.array_equal(coarse[kept], fine[kept])
    if functional is FunctionalId.LOG:
        assert not np.array_equal(coarse, fine)


def test_evaluation_converges_spectrally():
    """Test R2 of a Gaussian gains far more than a fixed order when the grid doubles."""
    errors = []
    for points in (32, 64):
        grid = Grid.line(points, 20.0)
        x = grid.axes[0]
        inside = np.abs(x) <= 2.0
        values = evaluate(FunctionalId.R2, Wavefunction(grid, np.exp(-0.5 * x ** 2)))
        errors.append(float(np.max(np.abs(values[inside] - (4.0 * x[inside] ** 2 - 2.0)))))

    assert errors[1] < 1e-8
    assert errors[0] > 2.0 ** 8 * errors[1]
