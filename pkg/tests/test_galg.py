import numpy as np
import pytest
from sympy import Rational

from engine.constant import IDENTITY_IDS
from engine.errors import StructuralError, UnsupportedPairingError
from engine.galg import (GrassmannScalar, InternalAlgebra, MixedForm, conjugate_array, eta_pair, exact_complex,
                         exact_rational, interior_coordinate, lie_bracket, merge_sign, permutation_sign, power,
                         scalar_form, verify_pointwise_identity, wedge)


def total_parity(form):
    return form.parity()


def test_merge_sign():
    assert merge_sign(0b01, 0b10) == 1
    assert merge_sign(0b10, 0b01) == -1
    assert merge_sign(0b011, 0b100) == 1
    assert merge_sign(0b100, 0b011) == 1
    assert merge_sign(0b101, 0b010) == -1
    assert merge_sign(0b11, 0b01) == 0


def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == (1, (0, 1, 2))
    assert permutation_sign((1, 0, 2)) == (-1, (0, 1, 2))
    assert permutation_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert permutation_sign((1, 1))[0] == 0


def test_grassmann_generators_anticommute():
    a = GrassmannScalar.generator(0, 2.0)
    b = GrassmannScalar.generator(1, 3.0)
    assert (a * b + b * a).max_abs() == 0
    assert (a * a).max_abs() == 0
    assert (a * b)[0b11] == 6.0
    assert (b * a)[0b11] == -6.0


def test_grassmann_strip_takes_left_coefficient():
    product = GrassmannScalar.generator(0) * GrassmannScalar.generator(2) * GrassmannScalar.generator(3)
    stripped = product.strip(0b1)
    assert stripped.comps == {0b1100: 1}
    stripped = product.strip(0b100)
    assert stripped.comps == {0b1001: -1}


def test_grassmann_parity():
    even = GrassmannScalar({0: 1.0, 0b11: 2.0})
    odd = GrassmannScalar({0b1: 1.0})
    assert even.parity() == 0
    assert odd.parity() == 1
    with pytest.raises(StructuralError):
        (even + odd).parity()


@pytest.mark.parametrize('degrees', [((1, 1), (1, 1)), ((1, 0), (2, 1)), ((0, 1), (1, 2)), ((1, 2), (2, 1)),
                                     ((0, 2), (3, 1))])
@pytest.mark.parametrize('parities', [(0, 0), (0, 1), (1, 1)])
def test_wedge_supercommutativity(algebra, exact_sampler, degrees, parities):
    (i1, j1), (i2, j2) = degrees
    a = exact_sampler.homogeneous(algebra, i1, j1, parities[0], (0, 1))
    b = exact_sampler.homogeneous(algebra, i2, j2, parities[1], (2, 3))
    sign = -1 if (total_parity(a) * total_parity(b)) % 2 else 1
    assert (wedge(a, b) - wedge(b, a).scale(sign)).max_abs() == 0


def test_coordinate_internal_swap_is_symmetric(algebra):
    # dx^1 v_1 and dx^2 v_2 are both even under the single grading
    first = np.zeros((3, 4))
    first[0, 1] = 1.0
    second = np.zeros((3, 4))
    second[1, 2] = 1.0
    a = MixedForm.from_array(algebra, 1, 1, first)
    b = MixedForm.from_array(algebra, 1, 1, second)
    assert (wedge(a, b) - wedge(b, a)).max_abs() == 0
    assert wedge(a, b).max_abs() == 1.0


def test_wedge_associativity(algebra, exact_sampler):
    a = exact_sampler.homogeneous(algebra, 1, 1, 1, (0, 1))
    b = exact_sampler.homogeneous(algebra, 1, 0, 0, (2, 3))
    c = exact_sampler.homogeneous(algebra, 0, 2, 1, (4, 5))
    assert (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs() == 0


def test_power_vanishes_beyond_form_dimension(exact_sampler, algebra):
    e = exact_sampler.homogeneous(algebra, 1, 1, 0, ())
    assert power(e, 4).comps == {} or power(e, 4).max_abs() == 0


def test_odd_scalar_anticommutes_with_odd_form(algebra, float_sampler):
    theta = scalar_form(algebra, GrassmannScalar.generator(5, 2.0))
    a = float_sampler.homogeneous(algebra, 1, 1, 1, (0,))
    assert theta.parity() == 1
    assert a.parity() == 1
    assert (wedge(theta, a) + wedge(a, theta)).max_abs() == 0
    assert wedge(theta, a).max_abs() > 0


def test_eta_pair_rejects_other_degrees(algebra, float_sampler):
    a = float_sampler.homogeneous(algebra, 1, 0, 0, ())
    with pytest.raises(UnsupportedPairingError):
        eta_pair(a, a)
    b = float_sampler.homogeneous(algebra, 0, 3, 0, ())
    with pytest.raises(UnsupportedPairingError):
        eta_pair(b, b)


def test_mismatched_algebras(float_sampler):
    a = float_sampler.homogeneous(InternalAlgebra(4, form_dim=3), 1, 1, 0, ())
    b = float_sampler.homogeneous(InternalAlgebra(4, form_dim=4), 1, 1, 0, ())
    with pytest.raises(StructuralError):
        wedge(a, b)
    with pytest.raises(StructuralError):
        a + float_sampler.homogeneous(InternalAlgebra(4, form_dim=3), 1, 2, 0, ())


def test_negative_degree(algebra):
    with pytest.raises(StructuralError):
        MixedForm(algebra, -1, 0)


def test_ghost_numbers_add_under_wedge(algebra, float_sampler):
    a = float_sampler.homogeneous(algebra, 0, 2, 1, (0,), ghost=1)
    b = float_sampler.homogeneous(algebra, 3, 2, 1, (1,), ghost=-1)
    assert wedge(a, b).ghost == 0
    assert wedge(a, a).ghost == 2


@pytest.mark.parametrize('name', IDENTITY_IDS)
@pytest.mark.parametrize('seed', [0, 1, 2])
def test_identity_catalog_exact(name, seed):
    assert verify_pointwise_identity(name, seed, exact=True) == 0


@pytest.mark.parametrize('name', IDENTITY_IDS)
def test_identity_catalog_float(name):
    assert verify_pointwise_identity(name, 5, exact=False) < 1e-10


def test_unknown_identity():
    with pytest.raises(StructuralError):
        verify_pointwise_identity('nope', 0)


@pytest.mark.parametrize('beta_batched', [False, True])
def test_lie_bracket_on_a_batch_matches_each_point(algebra, float_sampler, beta_batched):
    alpha_values = float_sampler.array((5, algebra.form_size(1), algebra.internal_size(2)))
    beta_shape = (algebra.form_size(1), algebra.internal_size(1))
    beta_values = float_sampler.array(((5,) if beta_batched else ()) + beta_shape)
    alpha = MixedForm.from_array(algebra, 1, 2, alpha_values)
    beta = MixedForm.from_array(algebra, 1, 1, beta_values)
    batched = lie_bracket(alpha, beta)
    assert batched.batch == (5,)
    for n in range(5):
        single = lie_bracket(MixedForm.from_array(algebra, 1, 2, alpha_values[n]),
                             MixedForm.from_array(algebra, 1, 1, beta_values[n] if beta_batched else beta_values))
        assert np.allclose(batched.comps[0][n], single.comps[0], atol=1e-13)


def test_contraction_above_form_dimension_is_empty(algebra):
    contracted = interior_coordinate(0, MixedForm.zero(algebra, 4, 1))
    assert (contracted.i, contracted.j) == (3, 1)
    assert not contracted.comps


def test_conjugate_array_on_gaussian_rationals():
    values = np.empty(3, dtype=object)
    values[0] = exact_complex(1, 2)
    values[1] = exact_complex(Rational(-1, 3), Rational(1, 2))
    values[2] = exact_rational(5, 7)
    conjugated = conjugate_array(values)
    assert conjugated[0] == exact_complex(1, -2)
    assert conjugated[1] == exact_complex(Rational(-1, 3), Rational(-1, 2))
    assert conjugated[2] == exact_rational(5, 7)
    assert np.array_equal(conjugate_array(np.array([1 + 2j])), np.array([1 - 2j]))
