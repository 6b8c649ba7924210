import numpy as np
import pytest

from engine.constant import DERIVATIVE_IDENTITY_IDS
from engine.errors import AliasingError, ConfigError, StructuralError
from engine.fields import (CovariantDerivative, LieAlgebra, TorusGrid, TrigPoly, enforce_representative, exterior_d,
                           integrate, random_section, random_vector_field, sample_config, structural_residuals,
                           verify_convolution_backend, verify_derivative_identity)
from engine.galg import InternalAlgebra, iota_vector

SPECTRAL_TOLERANCE = 1e-9


@pytest.mark.parametrize('name', DERIVATIVE_IDENTITY_IDS)
@pytest.mark.parametrize('seed', [0, 1])
def test_derivative_identities(name, seed):
    assert verify_derivative_identity(name, seed, K=1, M=16) < SPECTRAL_TOLERANCE


@pytest.mark.parametrize('name', DERIVATIVE_IDENTITY_IDS)
def test_derivative_identities_without_reference(name):
    assert verify_derivative_identity(name, 4, K=1, M=16, reference=False) < SPECTRAL_TOLERANCE


def test_unknown_derivative_identity():
    with pytest.raises(StructuralError):
        verify_derivative_identity('?', 0)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_convolution_backend(seed):
    assert verify_convolution_backend(seed, K=2, M=16) < SPECTRAL_TOLERANCE


def test_convolution_backend_rejects_small_grid():
    with pytest.raises(AliasingError):
        verify_convolution_backend(0, K=2, M=8)


def test_trig_poly_value_shapes_must_match():
    rng = np.random.default_rng(0)
    with pytest.raises(StructuralError):
        TrigPoly.random(rng, 1, (2,)) * TrigPoly.random(rng, 1, (3,))


def test_trig_poly_bandwidth_adds():
    rng = np.random.default_rng(1)
    product = TrigPoly.random(rng, 1, ()) * TrigPoly.random(rng, 2, ())
    assert product.bandwidth == 3


def test_grid_aliasing_guard():
    grid = TorusGrid(8)
    assert grid.max_bandwidth == 3
    grid.check(3)
    with pytest.raises(AliasingError):
        grid.check(4)


def test_exterior_derivative_squares_to_zero(algebra, small_grid):
    rng = np.random.default_rng(2)
    form = random_section(rng, algebra, 1, 1, 1, small_grid)
    assert exterior_d(exterior_d(form, small_grid), small_grid).max_abs() < 1e-10


def test_exact_density_integrates_to_zero(algebra, small_grid):
    rng = np.random.default_rng(3)
    form = random_section(rng, algebra, 2, 0, 1, small_grid)
    assert integrate(exterior_d(form, small_grid), small_grid).max_abs() < 1e-10


def test_exterior_derivative_of_top_form_is_empty(algebra, small_grid):
    rng = np.random.default_rng(5)
    top = random_section(rng, algebra, 3, 1, 1, small_grid)
    d_top = exterior_d(top, small_grid)
    assert (d_top.i, d_top.j) == (4, 1)
    assert not d_top.comps
    assert d_top.max_abs() == 0


def test_lie_derivative_of_top_form(algebra, small_grid):
    rng = np.random.default_rng(6)
    top = random_section(rng, algebra, 3, 0, 1, small_grid)
    xi = random_vector_field(rng, algebra, 1, small_grid, masks=(0,))
    derivative = CovariantDerivative(small_grid).lie_derivative(xi, top)
    assert (derivative.i, derivative.j) == (3, 0)
    # Cartan: only d iota_xi survives on a top form
    cartan = exterior_d(iota_vector(xi, top), small_grid)
    assert (derivative - cartan).max_abs() < 1e-10
    assert integrate(derivative, small_grid).max_abs() < 1e-10


def test_integrate_needs_top_degree(algebra, small_grid):
    rng = np.random.default_rng(4)
    with pytest.raises(StructuralError):
        integrate(random_section(rng, algebra, 2, 0, 1, small_grid), small_grid)


@pytest.mark.parametrize('name', ['su2', 'so3', 'u1'])
def test_lie_algebras(name):
    lie = LieAlgebra.from_name(name)
    assert lie.jacobi_residual() == 0
    assert lie.invariance_residual() == 0


def test_unknown_lie_algebra():
    with pytest.raises(ConfigError):
        LieAlgebra.from_name('e8')


def test_sample_config_rejects_unknown_theory():
    with pytest.raises(ConfigError):
        sample_config('gravitino', 0)


def test_sample_config_rejects_aliasing(small_grid):
    with pytest.raises(AliasingError):
        sample_config('pc', 0, K=4, grid=small_grid)


def test_sampled_point_satisfies_constraints(point_factory, theory):
    point = point_factory(theory)
    residuals = structural_residuals(point)
    assert 'omega' in residuals
    if theory == 'scalar':
        assert set(residuals) == {'omega', 'Pi', 'p'}
    if theory == 'ym':
        assert set(residuals) == {'omega', 'B', 'rho'}
    assert max(residuals.values()) < 1e-9


def test_enforcement_is_idempotent(point_factory):
    point = point_factory('scalar', seed=5)
    again = enforce_representative(point)
    assert (again.field('omega') - point.field('omega')).max_abs() < 1e-10
    assert (again.field('Pi') - point.field('Pi')).max_abs() < 1e-10


def test_sampling_is_reproducible(point_factory):
    first = point_factory('ym', seed=6)
    second = point_factory('ym', seed=6)
    for name in ('e', 'omega', 'A', 'B'):
        assert (first.field(name) - second.field(name)).max_abs() == 0


def test_spinor_point_owns_generators(point_factory):
    point = point_factory('spinor')
    assert point.generators['psi'] and point.generators['psibar']
    assert not set(point.generators['psi']) & set(point.generators['psibar'])
    assert point.generator_count == len(point.generators['psi']) + len(point.generators['psibar'])
    assert point.field('psi').grassmann_parity() == 1


def test_point_field_lookup(point_factory):
    point = point_factory('pc')
    with pytest.raises(StructuralError):
        point.field('phi')
    assert InternalAlgebra(4, form_dim=3) == point.algebra
