import numpy as np
import pytest

from engine.clifford import build_gamma
from engine.errors import DegeneracyError, StructuralError
from engine.fields import LieAlgebra
from engine.framelin import (Coframe, KernelMap, decompose_B, decompose_omega, decompose_Pi, invert_kernel_map,
                             lightlike_frame, map_A_e, map_phi_e, presymplectic_kernel, unflatten, verify_W_lemma)
from engine.galg import FormSampler, MixedForm, eta_pair, gamma_form, lie_bracket, power, wedge


def random_form(rng, coframe, i, j, extra=(1, 1), complex_values=False):
    alg = coframe.algebra
    shape = coframe.batch + (alg.form_size(i), alg.internal_size(j)) + tuple(extra)
    array = rng.standard_normal(shape)
    if complex_values:
        array = array + 1j * rng.standard_normal(shape)
    return MixedForm(alg, i, j, {0: array}, bandwidth=None)


def test_w_lemma(frames):
    reports = verify_W_lemma(frames)
    failed = [report.map_id for report in reports if not report.passed]
    assert failed == []


def test_w_kernel_dimensions(frames):
    reports = {report.map_id: report for report in verify_W_lemma(frames)}
    assert reports['W1(1,2) kernel'].kernel_dim == 6
    assert reports['W1(2,1) kernel'].kernel_dim == 6
    assert reports['W3(0,1) kernel'].kernel_dim == 3
    assert reports['W2(0,2) kernel'].kernel_dim == 3
    assert reports['rho2 bijective'].rank == 6


def test_lightlike_frame_is_degenerate():
    with pytest.raises(DegeneracyError):
        lightlike_frame().check()
    with pytest.raises(DegeneracyError):
        KernelMap.A_e(lightlike_frame())


def test_singular_frame_rejected():
    frame = np.array([[1.0, 0.0, 0.0, 0.0],
                      [0.0, 1.0, 0.0, 0.0],
                      [1.0, 1.0, 0.0, 0.0]])
    with pytest.raises(DegeneracyError):
        Coframe(frame, np.array([0.0, 0.0, 0.0, 1.0])).check()


def test_kernel_maps_round_trip(frames):
    rng = np.random.default_rng(5)
    alg = frames.algebra
    e = frames.e()
    target = random_form(rng, frames, 1, 0)
    p = invert_kernel_map(KernelMap.A_e(frames), target, alg, 1)
    assert (map_A_e(frames, p) - target).max_abs() < 1e-10
    assert wedge(power(e, 3), p).max_abs() < 1e-10
    target = random_form(rng, frames, 2, 0)
    b = invert_kernel_map(KernelMap.phi_e(frames), target, alg, 2)
    assert (map_phi_e(frames, b) - target).max_abs() < 1e-10
    assert wedge(power(e, 2), b).max_abs() < 1e-10


def test_omega_decomposition(frames):
    rng = np.random.default_rng(6)
    e, en = frames.e(), frames.en()
    T = random_form(rng, frames, 2, 2)
    sigma, v = decompose_omega(frames, T)
    assert (wedge(e, sigma) + wedge(en, lie_bracket(v, e)) - T).max_abs() < 1e-10
    assert wedge(e, v).max_abs() < 1e-10
    kernel = frames.kernel(1, 1, 2)
    v0 = unflatten({0: np.einsum('...nk,...k->...n', kernel, rng.standard_normal(frames.batch + (6,)))},
                   frames.algebra, 1, 2)
    sigma0 = random_form(rng, frames, 1, 1)
    sigma1, v1 = decompose_omega(frames, wedge(e, sigma0) + wedge(en, lie_bracket(v0, e)))
    assert (sigma1 - sigma0).max_abs() < 1e-10
    assert (v1 - v0).max_abs() < 1e-10


def test_omega_decomposition_needs_22(frames):
    rng = np.random.default_rng(7)
    with pytest.raises(StructuralError):
        decompose_omega(frames, random_form(rng, frames, 2, 1))


def test_pi_decomposition(frames):
    rng = np.random.default_rng(8)
    e = frames.e()
    Pi_tilde = random_form(rng, frames, 0, 1)
    dphi = random_form(rng, frames, 1, 0)
    Pi, p = decompose_Pi(frames, Pi_tilde, dphi)
    assert (eta_pair(e, Pi) + dphi).max_abs() < 1e-10
    assert (Pi + p - Pi_tilde).max_abs() < 1e-12
    _, p_again = decompose_Pi(frames, Pi, dphi)
    assert p_again.max_abs() < 1e-10


def test_b_decomposition(frames):
    rng = np.random.default_rng(9)
    e2 = power(frames.e(), 2)
    B_tilde = random_form(rng, frames, 0, 2)
    F_A = random_form(rng, frames, 2, 0)
    B, b = decompose_B(frames, B_tilde, F_A)
    assert (F_A + eta_pair(e2, B).scale(0.5)).max_abs() < 1e-10
    assert wedge(e2, b).max_abs() < 1e-10
    _, b_again = decompose_B(frames, B, F_A)
    assert b_again.max_abs() < 1e-10


def kernel_matter(theory, coframe, rng):
    if theory == 'scalar':
        return {'Pi': random_form(rng, coframe, 0, 1)}
    if theory == 'ym':
        lie = LieAlgebra.from_name('su2')
        return {'B': random_form(rng, coframe, 0, 2, extra=(lie.dim, 1)), 'lie': lie}
    if theory == 'spinor':
        return {'psi': random_form(rng, coframe, 0, 0, extra=(4, 1), complex_values=True),
                'psibar': random_form(rng, coframe, 0, 0, extra=(1, 4), complex_values=True),
                'gamma': gamma_form(coframe.algebra, build_gamma(4).gammas)}
    return {}


EXPECTED_KERNEL = {'pc': 6, 'scalar': 9, 'ym': 15, 'spinor': 6}


def test_presymplectic_kernel(frames, theory):
    rng = np.random.default_rng(10)
    report, shape = presymplectic_kernel(theory, frames, kernel_matter(theory, frames, rng))
    assert report.kernel_dim == EXPECTED_KERNEL[theory]
    assert report.passed
    assert max(shape.values(), default=0.0) < 1e-8


def test_presymplectic_kernel_unknown_theory(frames):
    with pytest.raises(StructuralError):
        presymplectic_kernel('gravitino', frames)


def test_omega_decomposition_at_a_single_point(algebra):
    frame, normal = FormSampler(np.random.default_rng(21), exact=False).boundary_frame(algebra)
    coframe = Coframe(frame, normal, algebra=algebra)
    assert coframe.batch == ()
    rng = np.random.default_rng(22)
    T = random_form(rng, coframe, 2, 2)
    sigma, v = decompose_omega(coframe, T)
    assert (wedge(coframe.e(), sigma) + wedge(coframe.en(), lie_bracket(v, coframe.e())) - T).max_abs() < 1e-10
