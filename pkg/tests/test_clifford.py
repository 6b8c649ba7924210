import numpy as np
import pytest

from engine.clifford import (CliffordElement, SpinElement, bivector, build_gamma, check_bracket_iso, clifford_invariants,
                             covering_map, spin_lie_iso)
from engine.errors import StructuralError
from engine.galg import InternalAlgebra, QQ, array_max_abs

ETA = (-1, 1, 1, 1)

EXACT_CHECKS = ('anticommutator', 'adjoint', 'trace', 'chirality-square', 'chirality-dims', 'associativity',
                'involution', 'transpose', 'covering-so', 'covering-homomorphism', 'covering-2to1', 'spin-lie-iso',
                'dcov-gamma', 'triangle-basis')


@pytest.fixture(scope='module')
def invariants():
    return {seed: clifford_invariants(seed) for seed in (0, 1)}


@pytest.mark.parametrize('seed', [0, 1])
@pytest.mark.parametrize('check', EXACT_CHECKS)
def test_exact_invariants_vanish(invariants, seed, check):
    assert invariants[seed][check] == 0


@pytest.mark.parametrize('seed', [0, 1])
def test_spin_lie_derivative(invariants, seed):
    assert invariants[seed]['spin-lie-derivative'] < 1e-6


def test_gamma_anticommutator_sign():
    rep = build_gamma(4)
    g = rep.gammas
    assert np.allclose(g[0] @ g[0], np.eye(4))
    assert np.allclose(g[1] @ g[1], -np.eye(4))
    assert np.allclose(g[0] @ g[2] + g[2] @ g[0], 0)
    assert rep.anticommutator_residual() < 1e-14


def test_chirality_splits_evenly():
    assert build_gamma(4).chirality_dims() == (2, 2)
    assert build_gamma(4, exact=True).chirality_dims() == (2, 2)


def test_gamma_dimension():
    with pytest.raises(StructuralError):
        build_gamma(3)


def test_vectors_square_to_minus_norm():
    v = CliffordElement.vector([QQ(2), QQ(1), QQ(0), QQ(3)], ETA)
    square = v * v
    # v v = -eta(v, v) with eta(v, v) = -4 + 1 + 9
    assert (square - CliffordElement.scalar(ETA, QQ(-6))).max_abs() == 0


def test_bivectors_close_under_commutator():
    x = bivector(ETA, 0, 1)
    y = bivector(ETA, 1, 2)
    bracket = x.commutator(y)
    assert (bracket - bracket.grade(2)).max_abs() == 0
    assert bracket.max_abs() > 0


def test_covering_map_is_two_to_one():
    u = [QQ(0), QQ(1), QQ(0), QQ(0)]
    w = [QQ(0), QQ(0), QQ(1), QQ(0)]
    spin = SpinElement.from_vectors([u, w], ETA)
    assert array_max_abs(covering_map(spin) - covering_map(-spin)) == 0


def test_spin_lie_iso_is_antisymmetric_in_eta():
    coefficients = [QQ(1), QQ(0), QQ(0), QQ(2), QQ(0), QQ(-1)]
    matrix = spin_lie_iso(coefficients, ETA)
    metric = np.diag(ETA).astype(object)
    assert array_max_abs(matrix.T.dot(metric) + metric.dot(matrix)) == 0
    assert array_max_abs(matrix) > 0


def test_bracket_iso():
    assert check_bracket_iso(InternalAlgebra(4, form_dim=3)) == 0


@pytest.mark.parametrize('exact', [True, False])
def test_dirac_adjoint_of_gammas(exact):
    # spacelike gammas are imaginary: gamma_0 gamma_a^dagger gamma_0 = gamma_a
    rep = build_gamma(4, exact=exact)
    assert rep.adjoint_residual() == (0 if exact else pytest.approx(0, abs=1e-14))
