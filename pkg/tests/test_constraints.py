import numpy as np
import pytest

from engine.errors import ConfigError, StructuralError
from engine.constraints import (CONSTRAINT_KINDS, CROSS_BRACKET_KAPPA, HVF_KAPPA, SELF_BRACKET_KAPPA, GaugeParams,
                                GeneratorPool, bracket_kappa, bracket_relations, check_hvf, compare_fixed,
                                eval_constraint, hamiltonian_vf, relation_grade, sample_params, sample_direction,
                                symplectic_pairing, tangent_components, tangent_parity, verify_bracket_table)
from engine.constant import GRADE_EXACT, GRADE_SPECTRAL
from engine.fields import TorusGrid
from engine.galg import GrassmannScalar

# 2 * 6 * K + 1 points keep the deepest bracket products alias free at K = 1
BRACKET_GRID = 13


@pytest.fixture
def bracket_point(point_factory):
    def factory(theory, seed=3):
        return point_factory(theory, seed=seed, grid=TorusGrid(BRACKET_GRID))
    return factory


def test_generator_pool():
    pool = GeneratorPool(3)
    assert pool.take(2) == [3, 4]
    assert pool.dual_pair() == (1 << 5) | (1 << 6)
    assert pool.next == 7


def test_compare_fixed_uses_the_given_kappa():
    rhs = GrassmannScalar({0b11: 1.5, 0b101: -2.0})
    residual, relative, ratio = compare_fixed(rhs * -1.0, rhs, HVF_KAPPA)
    assert residual == 0
    assert relative == 0
    assert abs(ratio + 1.0) < 1e-15


def test_compare_fixed_does_not_absorb_a_factor():
    rhs = [GrassmannScalar({0b11: 1.0}), GrassmannScalar({0b11: 3.0})]
    lhs = [r * 0.5 for r in rhs]
    residual, relative, ratio = compare_fixed(lhs, rhs, 1.0)
    assert residual == pytest.approx(1.5)
    assert relative == pytest.approx(0.5)
    assert ratio.real == pytest.approx(0.5)


def test_compare_fixed_zero_rhs():
    residual, relative, ratio = compare_fixed(GrassmannScalar({1: 0.25}), GrassmannScalar(), 2.0)
    assert residual == 0.25
    assert relative == 0.25
    assert ratio == 0


def test_bracket_kappa():
    for relation in ('LL', 'PP', 'HH', 'MM'):
        assert bracket_kappa(relation) == SELF_BRACKET_KAPPA == 2.0
    for relation in ('LP', 'LH', 'PH', 'ML', 'MP', 'MH'):
        assert bracket_kappa(relation) == CROSS_BRACKET_KAPPA == 1.0


def test_relation_tables():
    assert bracket_relations('pc') == ['LL', 'LP', 'PP', 'LH', 'PH', 'HH']
    assert 'MM' in bracket_relations('ym')
    assert relation_grade('LL') in (GRADE_EXACT, GRADE_SPECTRAL)
    with pytest.raises(StructuralError):
        relation_grade('LM')


def test_parameters_are_odd_with_ghost_one(bracket_point):
    point = bracket_point('ym')
    pool = GeneratorPool(point.generator_count)
    params = sample_params(point, np.random.default_rng(0), ('c', 'lam', 'mu'), pool, budget=2)
    for name in ('c', 'lam', 'mu'):
        value = getattr(params, name)
        assert value.grassmann_parity() == 1
        assert value.ghost == 1
    generators = [g for gens in params.generators.values() for g in gens]
    assert len(generators) == len(set(generators)) == 6


def test_mu_needs_yang_mills(bracket_point):
    point = bracket_point('pc')
    with pytest.raises(ConfigError):
        sample_params(point, np.random.default_rng(0), ('mu',), GeneratorPool())


def test_constraint_requirements(bracket_point):
    point = bracket_point('pc')
    with pytest.raises(StructuralError):
        eval_constraint('L', point, GaugeParams())
    params = sample_params(point, np.random.default_rng(1), ('c',), GeneratorPool())
    with pytest.raises(StructuralError):
        eval_constraint('M', point, params.replace(mu=params.c))


def test_constraints_are_linear_in_parameters(bracket_point):
    point = bracket_point('scalar')
    params = sample_params(point, np.random.default_rng(2), ('c', 'xi', 'lam'), GeneratorPool(), budget=2)
    for kind in ('L', 'P', 'H'):
        once = eval_constraint(kind, point, params)
        twice = eval_constraint(kind, point, params.scale(2.0))
        assert (twice - once * 2.0).max_abs() < 1e-10 * max(1.0, once.max_abs())
        assert once.parity() == 1


def test_pairing_is_antisymmetric_on_even_directions(bracket_point):
    point = bracket_point('pc')
    rng = np.random.default_rng(4)
    X = tangent_components(point, sample_direction(point, rng, 'e'))
    Y = tangent_components(point, sample_direction(point, rng, 'omega'))
    assert tangent_parity(X) == 0
    forward = symplectic_pairing(point, X, Y)
    backward = symplectic_pairing(point, Y, X)
    assert forward.max_abs() > 0
    assert (forward + backward).max_abs() < 1e-10


def test_hamiltonian_vector_fields_are_odd(bracket_point):
    point = bracket_point('pc')
    params = sample_params(point, np.random.default_rng(5), ('c', 'xi', 'lam'), GeneratorPool(), budget=2)
    for kind in ('L', 'P', 'H'):
        assert tangent_parity(hamiltonian_vf(kind, point, params).components) == 1


@pytest.mark.parametrize('kind', ['L', 'H'])
def test_hamiltonian_vector_field_matches_variation(bracket_point, kind):
    point = bracket_point('pc')
    rng = np.random.default_rng(6)
    pool = GeneratorPool(point.generator_count)
    params = sample_params(point, rng, ('c', 'lam'), pool, budget=2)
    records = check_hvf(kind, point, params, rng, pool, directions=3)
    assert [r['species'] for r in records] == ['e', 'omega']
    for record in records:
        assert record['pass'], record


def test_scalar_diffeomorphism_vector_field(bracket_point):
    point = bracket_point('scalar')
    rng = np.random.default_rng(7)
    pool = GeneratorPool(point.generator_count)
    params = sample_params(point, rng, ('xi',), pool, budget=2)
    X = hamiltonian_vf('P', point, params)
    assert (X['p'].i, X['p'].j) == (3, 4)
    assert (X['phi'].i, X['phi'].j) == (0, 0)
    assert X['p'].max_abs() > 0
    records = check_hvf('P', point, params, rng, pool, directions=3)
    assert [r['species'] for r in records] == ['e', 'omega', 'phi', 'p']
    for record in records:
        assert record['kappa'] == HVF_KAPPA
        assert record['pass'], record


@pytest.mark.parametrize('relation', ['LL', 'LP', 'HH'])
def test_pure_gravity_brackets(bracket_point, relation):
    point = bracket_point('pc')
    records = verify_bracket_table('pc', 3, point=point, budget=2, relations=[relation])
    assert len(records) == 1
    assert records[0]['relation'] == relation
    assert records[0]['pass'], records[0]


def test_yang_mills_gauge_bracket(bracket_point):
    point = bracket_point('ym')
    records = verify_bracket_table('ym', 3, point=point, budget=2, relations=['MM', 'ML'])
    assert all(r['pass'] for r in records), records


def test_every_constraint_kind_is_known():
    assert CONSTRAINT_KINDS == ('L', 'P', 'H', 'M')
