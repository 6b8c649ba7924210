#!/usr/bin/env python3

"""
Fields

Boundary field configurations on the flat three-torus [0, 2 pi)^3.
Coefficients are sampled as trigonometric polynomials and evaluated on a
uniform grid; derivatives are spectral and every operand carries its
trigonometric bandwidth, so products, derivatives and integrals of sampled
fields are exact as long as the grid resolves the tracked bandwidth.
Quantities built from frame inverses are not band limited and converge
spectrally.

Copyright 2026 by Michael R. McPherson, Charlottesville, VA
mailto:mcpherson@acm.org
http://www.kq9p.us

This program is free software; you can redistribute it and/or modify it under
the terms of the GNU General Public License as published by the Free
Software Foundation; either version 3 of the License, or (at your option) any
later version.

This program is distributed in the hope that it will be useful, but WITHOUT ANY
WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A
PARTICULAR PURPOSE.  See the GNU General Public License for more
details.

You should have received a copy of the GNU General Public License along with
this program. If not, see <http://www.gnu.org/licenses/>.
"""

__author__ = 'Michael R. McPherson <mcpherson@acm.org>'

import logging
import math

import numpy as np
import scipy.fft
import scipy.signal

from engine.clifford import build_gamma
from engine.constant import DEFAULTS, THEORIES
from engine.errors import AliasingError, ConfigError, DegeneracyError, SamplerError, StructuralError
from engine.framelin import Coframe, decompose_B, decompose_Pi, decompose_omega, default_normal, stacked_solve
from engine.galg import (GrassmannScalar, InternalAlgebra, MixedForm, VectorField, coframe_form, eta_pair,
                         gamma_form, interior_coordinate, iota_vector, j_internal, lie_bracket, power,
                         spin_generators, vector_form, wedge)

logger = logging.getLogger(__name__)

TWO_PI_CUBED = (2.0 * math.pi) ** 3


"""
Lie algebras
"""


class LieAlgebra:
    """Structure constants and invariant form of a gauge Lie algebra.

    Attributes
    ----------
    name : str
    structure : ndarray
        f[I, J, K] with [T_I, T_J] = f_IJ^K T_K.
    kappa : ndarray
        Invariant symmetric form Tr(T_I T_J).
    dim : int

    Values of the algebra are stored in the (dim, 1) matrix slot of a
    MixedForm.
    """

    def __init__(self, name, structure, kappa):
        self.name = name
        self.structure = np.asarray(structure, dtype=float)
        self.kappa = np.asarray(kappa, dtype=float)
        self.dim = self.structure.shape[0]
        if self.structure.shape != (self.dim,) * 3 or self.kappa.shape != (self.dim, self.dim):
            raise ConfigError('Lie algebra {} has inconsistent structure constants'.format(name))

    @classmethod
    def from_name(cls, name):
        if name in ('su2', 'so3'):
            epsilon = np.zeros((3, 3, 3))
            for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
                epsilon[i, j, k] = 1.0
                epsilon[j, i, k] = -1.0
            return cls(name, epsilon, np.eye(3))
        if name == 'u1':
            return cls(name, np.zeros((1, 1, 1)), np.eye(1))
        raise ConfigError('Unknown Lie algebra {}'.format(name))

    def __repr__(self):
        return 'LieAlgebra({}, dim={})'.format(self.name, self.dim)

    def ad(self, a):
        """Matrix-valued form ad(a)[K, J] = a^I f_IJ^K."""
        f = self.structure
        return a.map_arrays(lambda arr: np.einsum('...i,ijk->...kj', arr[..., 0], f))

    def bracket(self, a, b):
        return wedge(self.ad(a), b)

    def lower(self, a):
        """Row-valued form a^I kappa_IJ."""
        k = self.kappa
        return a.map_arrays(lambda arr: np.einsum('...i,ij->...j', arr[..., 0], k)[..., None, :])

    def trace(self, a, b):
        """Tr(a b) = kappa_IJ a^I b^J, a scalar form."""
        return wedge(self.lower(a), b)

    def trace_pair(self, a, b):
        """Tr(a, b): trace together with the internal product."""
        return eta_pair(self.lower(a), b)

    def jacobi_residual(self):
        f = self.structure
        total = (np.einsum('ijl,lkm->ijkm', f, f) + np.einsum('jkl,lim->ijkm', f, f) +
                 np.einsum('kil,ljm->ijkm', f, f))
        return float(np.max(np.abs(total))) if total.size else 0.0

    def invariance_residual(self):
        f, k = self.structure, self.kappa
        total = np.einsum('ijl,lk->ijk', f, k) + np.einsum('ikl,jl->ijk', f, k)
        return float(np.max(np.abs(total))) if total.size else 0.0


"""
Grid and spectral calculus
"""


class TorusGrid:
    """Uniform M^3 grid on the torus with spectral derivatives.

    Attributes
    ----------
    M : int
        Points per direction.
    shape : tuple
        Batch shape of every field array.
    wavenumbers : ndarray
        Integer wave numbers in FFT order, Nyquist mode zeroed.
    """

    def __init__(self, M, form_dim=3):
        if M < 1:
            raise StructuralError('grid size must be positive, got {}'.format(M))
        self.M = int(M)
        self.form_dim = form_dim
        self.shape = (self.M,) * form_dim
        k = scipy.fft.fftfreq(self.M, 1.0 / self.M)
        if self.M % 2 == 0:
            k[self.M // 2] = 0.0
        self.wavenumbers = k
        x = 2.0 * math.pi * np.arange(self.M) / self.M
        self.coordinates = np.meshgrid(*([x] * form_dim), indexing='ij')

    def __repr__(self):
        return 'TorusGrid(M={})'.format(self.M)

    @property
    def max_bandwidth(self):
        return (self.M - 1) // 2

    def check(self, bandwidth, what='operand'):
        if bandwidth is not None and 2 * bandwidth + 1 > self.M:
            raise AliasingError('{} has bandwidth {} but the grid has only {} points per direction'.format(
                what, bandwidth, self.M))

    def _is_constant(self, array):
        batch = array.shape[:-4]
        return len(batch) < self.form_dim or all(n == 1 for n in batch[-self.form_dim:])

    def derivative(self, array, axis):
        """Spectral d/dx^axis of a form coefficient array batch + (4 slot axes)."""
        if self._is_constant(array):
            return np.zeros_like(array, dtype=complex)
        position = array.ndim - 4 - self.form_dim + axis
        spectrum = scipy.fft.fft(array, axis=position)
        shape = [1] * array.ndim
        shape[position] = self.M
        spectrum = spectrum * (1j * self.wavenumbers.reshape(shape))
        return scipy.fft.ifft(spectrum, axis=position)

    def integral(self, values):
        """(2 pi)^3 times the grid mean over the leading axes."""
        values = np.asarray(values)
        if values.ndim < self.form_dim:
            return TWO_PI_CUBED * values
        return TWO_PI_CUBED * values.mean(axis=tuple(range(self.form_dim)))


def coordinate_differential(algebra, k):
    array = np.zeros((algebra.form_dim, 1))
    array[k, 0] = 1.0
    return MixedForm.from_array(algebra, 1, 0, array)


def partial(form, k, grid):
    grid.check(form.bandwidth, 'derivative operand')
    return form.map_arrays(lambda a: grid.derivative(a, k))


def exterior_d(form, grid):
    """Spectral exterior derivative d = dx^k ^ d/dx^k acting from the left."""
    alg = form.algebra
    grid.check(form.bandwidth, 'exterior derivative operand')
    if form.i + 1 > alg.form_dim or not form.comps:
        return MixedForm(alg, form.i + 1, form.j, {}, ghost=form.ghost, bandwidth=form.bandwidth)
    result = None
    for k in range(alg.form_dim):
        term = wedge(coordinate_differential(alg, k), partial(form, k, grid))
        result = term if result is None else result + term
    result.bandwidth = form.bandwidth
    return result


def integrate(density, grid):
    """Integral over the torus of a top-degree density; internal degree 0 or N."""
    alg = density.algebra
    if density.i != alg.form_dim or density.j not in (0, alg.N):
        raise StructuralError('cannot integrate a ({}, {}) form'.format(density.i, density.j))
    if tuple(density.extra) != (1, 1):
        raise StructuralError('integrand must be scalar valued, got {}'.format(density.extra))
    grid.check(density.bandwidth, 'integrand')
    return GrassmannScalar({m: complex(grid.integral(a[..., 0, 0, 0, 0])) for m, a in density.comps.items()})


def vector_bracket(xi, eta, grid):
    """Graded bracket [xi, eta]^k = xi^j d_j eta^k - (-1)^(|xi||eta|) eta^j d_j xi^k."""
    sign = -1.0 if (xi.components[0].grassmann_parity() * eta.components[0].grassmann_parity()) % 2 else 1.0
    out = []
    for k in range(len(xi.components)):
        total = None
        for j in range(len(xi.components)):
            term = (wedge(xi.components[j], partial(eta.components[k], j, grid)) -
                    wedge(eta.components[j], partial(xi.components[k], j, grid)).scale(sign))
            total = term if total is None else total + term
        out.append(total)
    return VectorField(out)


def vector_parity(xi):
    return xi.components[0].grassmann_parity()


class TrigPoly:
    """Trigonometric polynomial with coefficients on the modes [-K, K]^3.

    The product of polynomials with bandwidths K1 and K2 has bandwidth
    K1 + K2 and is computed by exact coefficient convolution; it serves as
    the independent backend for the grid evaluation.
    """

    def __init__(self, coefficients, real=False):
        self.coefficients = np.asarray(coefficients, dtype=complex)
        self.K = (self.coefficients.shape[0] - 1) // 2
        self.real = real

    @classmethod
    def random(cls, rng, K, value_shape=(), real=True, amplitude=1.0):
        shape = (2 * K + 1,) * 3 + tuple(value_shape)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        c = c * (amplitude / (2 * K + 1) ** 1.5)
        if real:
            c = 0.5 * (c + np.conj(np.flip(c, axis=(0, 1, 2))))
        return cls(c, real=real)

    @property
    def bandwidth(self):
        return self.K

    def realize(self, grid):
        modes = np.arange(-self.K, self.K + 1)
        x = 2.0 * math.pi * np.arange(grid.M) / grid.M
        E = np.exp(1j * np.outer(x, modes))
        values = np.einsum('ai,bj,ck,ijk...->abc...', E, E, E, self.coefficients)
        return values.real if self.real else values

    def __mul__(self, other):
        """Pointwise product; values multiply componentwise, modes convolve."""
        value_shape = self.coefficients.shape[3:]
        if other.coefficients.shape[3:] != value_shape:
            raise StructuralError('value shapes {} and {} differ'.format(value_shape, other.coefficients.shape[3:]))
        size = 2 * (self.K + other.K) + 1
        product = np.empty((size,) * 3 + value_shape, dtype=complex)
        modes = (slice(None),) * 3
        for index in np.ndindex(*value_shape):
            product[modes + index] = scipy.signal.convolve(self.coefficients[modes + index],
                                                           other.coefficients[modes + index],
                                                           mode='full', method='direct')
        return TrigPoly(product, real=self.real and other.real)

    def derivative(self, axis):
        modes = np.arange(-self.K, self.K + 1)
        shape = [1] * self.coefficients.ndim
        shape[axis] = len(modes)
        return TrigPoly(self.coefficients * (1j * modes.reshape(shape)), real=self.real)

    def integral(self):
        return TWO_PI_CUBED * self.coefficients[(self.K,) * 3]


def random_section(rng, algebra, i, j, K, grid, extra=(1, 1), masks=(0,), amplitude=1.0,
                   complex_values=False, ghost=0):
    """Form whose coefficients are independent random trigonometric polynomials."""
    shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
    comps = {}
    for m in masks:
        poly = TrigPoly.random(rng, K, shape, real=not complex_values, amplitude=amplitude)
        comps[m] = poly.realize(grid)
    return MixedForm(algebra, i, j, comps, ghost=ghost, bandwidth=K)


def random_vector_field(rng, algebra, K, grid, masks, amplitude=1.0, ghost=0):
    return VectorField([random_section(rng, algebra, 0, 0, K, grid, masks=masks, amplitude=amplitude, ghost=ghost)
                        for _ in range(algebra.form_dim)])


"""
Covariant calculus
"""

SPINOR_KINDS = ('psi', 'psibar', 'gamma')


class CovariantDerivative:
    """d_omega (and d_A on Lie-algebra values) on the torus grid.

    kind selects how omega acts besides the internal indices: None for
    plain forms, 'psi', 'psibar' or 'gamma' for spinor values, 'lie' for
    Lie-algebra values (adds [A, .]).
    """

    def __init__(self, grid, omega=None, A=None, lie=None, generators=None):
        self.grid = grid
        self.omega = omega
        self.A = A
        self.lie = lie
        self.generators = generators

    def act(self, alpha, form, kind=None):
        """[alpha, form] for an so(3,1)-valued alpha."""
        spin = kind if kind in SPINOR_KINDS else None
        return lie_bracket(alpha, form, spin=spin, generators=self.generators)

    def connection_terms(self, form, kind=None):
        out = MixedForm(form.algebra, form.i + 1, form.j, {}, ghost=form.ghost, bandwidth=0)
        if self.omega is not None and self.omega.comps:
            out = out + self.act(self.omega, form, kind)
        if kind == 'lie' and self.A is not None and self.A.comps:
            out = out + self.lie.bracket(self.A, form)
        return out

    def d(self, form, kind=None):
        return exterior_d(form, self.grid) + self.connection_terms(form, kind)

    def curvature(self):
        """F_omega = d omega + 1/2 [omega, omega]."""
        return exterior_d(self.omega, self.grid) + lie_bracket(self.omega, self.omega).scale(0.5)

    def gauge_curvature(self):
        """F_A = dA + 1/2 [A, A]."""
        return exterior_d(self.A, self.grid) + self.lie.bracket(self.A, self.A).scale(0.5)

    def lie_derivative(self, xi, form, kind=None):
        """L_xi = iota_xi d - (-1)^|iota_xi| d iota_xi with iota_xi of parity |xi| + 1."""
        sign = 1.0 if vector_parity(xi) % 2 else -1.0
        first = iota_vector(xi, self.d(form, kind))
        if form.i == 0:
            return first
        return first - self.d(iota_vector(xi, form), kind).scale(sign)

    def connection_lie_derivative(self, xi, omega):
        """Covariant Lie derivative of a connection omega relative to self.omega.

        L_xi(omega - omega0) + iota_xi F_omega0; the difference of two
        connections is a form, the reference supplies the curvature term.
        """
        return self.lie_derivative(xi, omega - self.omega) + iota_vector(xi, self.curvature())

    def with_connection(self, omega=None, A=None):
        return CovariantDerivative(self.grid, omega=omega, A=A, lie=self.lie, generators=self.generators)


def components_of(form, k):
    """Coordinate component iota_(d/dx^k) of a form."""
    return interior_coordinate(k, form)


"""
Phase-space points
"""

# primary fields of each theory, after e and omega
MATTER_FIELDS = {
    'pc': (),
    'scalar': ('phi', 'p'),
    'ym': ('A', 'rho'),
    'spinor': ('psi', 'psibar'),
}

DERIVED_FIELDS = {
    'Pi': ('e', 'phi', 'p'),
    'B': ('e', 'A', 'rho'),
}


class PhaseSpacePoint:
    """Boundary fields of one theory, representative-enforced after sampling.

    Attributes
    ----------
    theory : str
    grid : TorusGrid
    algebra : InternalAlgebra
    fields : dict
        name -> MixedForm over the grid.  Primary fields are e, omega and
        the Darboux matter fields; Pi and B are cached reconstructions.
    normal : ndarray
        Constant completing vector e_n.
    omega0, A0 : MixedForm or None
        Reference connections.
    Lambda : float
    lie : LieAlgebra or None
    gamma : GammaRep or None
    generators : dict
        Grassmann generator indices owned by the point (spinor fields).
    """

    def __init__(self, theory, grid, algebra, fields, normal, omega0=None, A0=None, Lambda=0.0, lie=None,
                 gamma=None, seed=None, K=0, generators=None, threshold=None):
        if theory not in THEORIES:
            raise ConfigError('Unknown theory {}'.format(theory))
        self.theory = theory
        self.grid = grid
        self.algebra = algebra
        self.fields = dict(fields)
        self.normal = np.asarray(normal, dtype=float)
        self.omega0 = omega0
        self.A0 = A0
        self.Lambda = Lambda
        self.lie = lie
        self.gamma = gamma
        self.seed = seed
        self.K = K
        self.generators = dict(generators or {})
        self.threshold = DEFAULTS['degeneracy'] if threshold is None else threshold
        self._coframe = None

    def __repr__(self):
        return 'PhaseSpacePoint({}, grid={}, seed={}, K={})'.format(self.theory, self.grid.M, self.seed, self.K)

    @property
    def generator_count(self):
        used = [g for gens in self.generators.values() for g in gens]
        return max(used) + 1 if used else 0

    def primary_names(self):
        return ('e', 'omega') + MATTER_FIELDS[self.theory]

    def with_fields(self, updates):
        """New point with some fields replaced; stale derived fields are dropped."""
        fields = dict(self.fields)
        fields.update(updates)
        for name, deps in DERIVED_FIELDS.items():
            if name in fields and name not in updates and any(d in updates for d in deps):
                del fields[name]
        point = PhaseSpacePoint(self.theory, self.grid, self.algebra, fields, self.normal, omega0=self.omega0,
                                A0=self.A0, Lambda=self.Lambda, lie=self.lie, gamma=self.gamma, seed=self.seed,
                                K=self.K, generators=self.generators, threshold=self.threshold)
        if 'e' not in updates:
            point._coframe = self._coframe
        return point

    def field(self, name):
        if name in self.fields:
            return self.fields[name]
        if name == 'Pi':
            self.fields['Pi'] = reconstruct_Pi(self)
            return self.fields['Pi']
        if name == 'B':
            self.fields['B'] = reconstruct_B(self)
            return self.fields['B']
        raise StructuralError('theory {} has no field {}'.format(self.theory, name))

    def frame(self):
        """Body of the coframe, grid + (3, N) with frame[..., mu, a] = e^a_mu."""
        return -np.real(self.fields['e'].comps[0][..., 0, 0])

    def coframe(self):
        if self._coframe is None:
            frame = self.frame()
            normal = np.broadcast_to(self.normal, frame.shape[:-2] + self.normal.shape)
            self._coframe = Coframe(frame, normal, threshold=self.threshold, algebra=self.algebra)
        return self._coframe

    def e(self):
        return self.fields['e']

    def en(self):
        return vector_form(self.algebra, self.normal, bandwidth=0)

    def zero_reference(self):
        return MixedForm(self.algebra, 1, 2, {}, bandwidth=0)

    def reference(self):
        return self.omega0 if self.omega0 is not None else self.zero_reference()

    def reference_A(self):
        if self.A0 is not None:
            return self.A0
        return MixedForm(self.algebra, 1, 0, {0: np.zeros((3, 1, self.lie.dim, 1))}, bandwidth=0)

    def gamma_form(self):
        return gamma_form(self.algebra, self.gamma.gammas)

    def spin_generators(self):
        return spin_generators(self.algebra, self.gamma.gammas) if self.gamma is not None else None

    def covariant(self, omega=None, A=None):
        omega = self.fields['omega'] if omega is None else omega
        if A is None and self.theory == 'ym':
            A = self.fields['A']
        return CovariantDerivative(self.grid, omega=omega, A=A, lie=self.lie, generators=self.spin_generators())

    def reference_covariant(self):
        A0 = self.reference_A() if self.theory == 'ym' else None
        return CovariantDerivative(self.grid, omega=self.reference(), A=A0, lie=self.lie,
                                   generators=self.spin_generators())


def reconstruct_Pi(point):
    """Pi from (e, Pi) = -d phi and e^3 Pi / 3! = p, pointwise."""
    alg = point.algebra
    e = point.field('e')
    e3 = power(e, 3)
    dphi = exterior_d(point.field('phi'), point.grid)
    blocks = [lambda x: eta_pair(e, x), lambda x: wedge(e3, x).scale(1.0 / 6.0)]
    return stacked_solve(blocks, [-dphi, point.field('p')], alg, 0, 1, batch=point.grid.shape, dtype=complex,
                         name='Pi reconstruction')


def reconstruct_B(point):
    """B from F_A + 1/2 (e^2, B) = 0 and 1/2 e^2 B = rho, pointwise."""
    alg = point.algebra
    e2 = power(point.field('e'), 2)
    F_A = point.covariant().gauge_curvature()
    blocks = [lambda x: eta_pair(e2, x).scale(0.5), lambda x: wedge(e2, x).scale(0.5)]
    return stacked_solve(blocks, [-F_A, point.field('rho')], alg, 0, 2, extra=(point.lie.dim, 1),
                         batch=point.grid.shape, dtype=complex, name='B reconstruction')


def spinor_current(point, e_power, fields=None):
    """psibar (j_g j_g E gamma + gamma j_g j_g E) psi for E = e_power."""
    gamma = point.gamma_form()
    jj = j_internal(gamma, j_internal(gamma, e_power))
    psi = point.field('psi') if fields is None else fields['psi']
    psibar = point.field('psibar') if fields is None else fields['psibar']
    middle = wedge(jj, gamma) + wedge(gamma, jj)
    return wedge(psibar, middle, psi)


def structural_source(point, omega=None):
    """T = e_n (d_omega e - spinor correction), the Omega^(2,2) source of the omega decomposition."""
    e = point.field('e')
    torsion = point.covariant(omega=omega).d(e)
    if point.theory == 'spinor':
        torsion = torsion - spinor_current(point, power(e, 2)).scale(1j / 16.0)
    return wedge(point.en(), torsion)


def enforce_representative(point, rtol=1e-8):
    """Fix the representatives of omega, Pi and B by the pointwise decompositions."""
    coframe = point.coframe()
    coframe.check()
    _, v = decompose_omega(coframe, structural_source(point), rtol)
    updates = {'omega': point.field('omega') - v}
    e = point.field('e')
    if point.theory == 'scalar':
        Pi_tilde = point.fields.get('Pi_tilde', point.field('Pi'))
        Pi, _ = decompose_Pi(coframe, Pi_tilde, exterior_d(point.field('phi'), point.grid), rtol)
        updates['Pi'] = Pi
        updates['p'] = wedge(power(e, 3), Pi).scale(1.0 / 6.0)
    elif point.theory == 'ym':
        B_tilde = point.fields.get('B_tilde', point.field('B'))
        B, _ = decompose_B(coframe, B_tilde, point.covariant().gauge_curvature(), rtol)
        updates['B'] = B
        updates['rho'] = wedge(power(e, 2), B).scale(0.5)
    enforced = point.with_fields(updates)
    for name in ('Pi_tilde', 'B_tilde'):
        enforced.fields.pop(name, None)
    shift = wedge(e, v).max_abs()
    logger.debug('representative enforced: |v| %.3e, |e v| %.3e', v.max_abs(), shift)
    return enforced


def structural_residuals(point, rtol=1e-8):
    """Largest violation of each structural constraint over the grid."""
    out = {}
    coframe = point.coframe()
    _, v = decompose_omega(coframe, structural_source(point), rtol)
    out['omega'] = v.max_abs()
    e = point.field('e')
    if point.theory == 'scalar':
        out['Pi'] = (eta_pair(e, point.field('Pi')) + exterior_d(point.field('phi'), point.grid)).max_abs()
        out['p'] = (wedge(power(e, 3), point.field('Pi')).scale(1.0 / 6.0) - point.field('p')).max_abs()
    elif point.theory == 'ym':
        B = point.field('B')
        out['B'] = (point.covariant().gauge_curvature() + eta_pair(power(e, 2), B).scale(0.5)).max_abs()
        out['rho'] = (wedge(power(e, 2), B).scale(0.5) - point.field('rho')).max_abs()
    return out


def sample_config(theory, seed, K=None, grid=None, epsilon=None, lambda_cosmo=None, reference_amplitude=None,
                  lie_name=None, spinor_generators=None, threshold=None, budget=None, enforce=True):
    """Random nondegenerate configuration of a theory, representative-enforced.

    The coframe is a constant spacelike coframe plus an epsilon-sized
    trigonometric perturbation; e_n is the constant unit normal of the
    constant part.
    """
    K = DEFAULTS['K'] if K is None else K
    if K < 0:
        raise ConfigError('bandwidth K must be nonnegative, got {}'.format(K))
    grid = grid if isinstance(grid, TorusGrid) else TorusGrid(DEFAULTS['grid'] if grid is None else grid)
    grid.check(K, 'sampled field')
    epsilon = DEFAULTS['epsilon'] if epsilon is None else epsilon
    lambda_cosmo = DEFAULTS['lambda_cosmo'] if lambda_cosmo is None else lambda_cosmo
    reference_amplitude = DEFAULTS['reference_amplitude'] if reference_amplitude is None else reference_amplitude
    spinor_generators = DEFAULTS['spinor_grassmann'] if spinor_generators is None else spinor_generators
    threshold = DEFAULTS['degeneracy'] if threshold is None else threshold
    budget = DEFAULTS['resample_budget'] if budget is None else budget
    if theory not in THEORIES:
        raise ConfigError('Unknown theory {}'.format(theory))
    rng = np.random.default_rng(seed)
    algebra = InternalAlgebra(4, form_dim=3)
    coframe = None
    for attempt in range(budget):
        base = np.eye(3, 4, k=1) + 0.1 * rng.standard_normal((3, 4))
        wiggle = TrigPoly.random(rng, K, (3, 4), real=True, amplitude=epsilon).realize(grid)
        frame = base + wiggle
        try:
            normal = default_normal(base, algebra)
            coframe = Coframe(frame, np.broadcast_to(normal, frame.shape[:-2] + (4,)), threshold=threshold,
                              algebra=algebra)
            coframe.check()
            break
        except DegeneracyError as err:
            logger.debug('sample %d rejected: %s', attempt, err)
            coframe = None
    if coframe is None:
        raise SamplerError('no nondegenerate coframe for seed {} within {} samples'.format(seed, budget))
    fields = {
        'e': coframe_form(algebra, frame, bandwidth=K),
        'omega': random_section(rng, algebra, 1, 2, K, grid, amplitude=0.5),
    }
    omega0 = random_section(rng, algebra, 1, 2, K, grid, amplitude=reference_amplitude)
    omega0 = omega0 if reference_amplitude else None
    lie = A0 = gamma = None
    generators = {}
    if theory == 'scalar':
        fields['phi'] = random_section(rng, algebra, 0, 0, K, grid, amplitude=0.5)
        fields['Pi_tilde'] = random_section(rng, algebra, 0, 1, K, grid, amplitude=0.5)
    elif theory == 'ym':
        lie = LieAlgebra.from_name(lie_name or DEFAULTS['lie_algebra'])
        extra = (lie.dim, 1)
        fields['A'] = random_section(rng, algebra, 1, 0, K, grid, extra=extra, amplitude=0.5)
        fields['B_tilde'] = random_section(rng, algebra, 0, 2, K, grid, extra=extra, amplitude=0.5)
        A0 = random_section(rng, algebra, 1, 0, K, grid, extra=extra, amplitude=reference_amplitude)
        A0 = A0 if reference_amplitude else None
    elif theory == 'spinor':
        gamma = build_gamma(4, algebra.eta, exact=False)
        half = spinor_generators // 2
        generators = {'psi': list(range(half)), 'psibar': list(range(half, spinor_generators))}
        fields['psi'] = random_section(rng, algebra, 0, 0, K, grid, extra=(4, 1),
                                       masks=[1 << g for g in generators['psi']], amplitude=0.5,
                                       complex_values=True)
        fields['psibar'] = random_section(rng, algebra, 0, 0, K, grid, extra=(1, 4),
                                          masks=[1 << g for g in generators['psibar']], amplitude=0.5,
                                          complex_values=True)
    point = PhaseSpacePoint(theory, grid, algebra, fields, normal, omega0=omega0, A0=A0, Lambda=lambda_cosmo,
                            lie=lie, gamma=gamma, seed=seed, K=K, generators=generators, threshold=threshold)
    point._coframe = coframe
    if theory == 'scalar':
        point.fields['Pi'] = point.fields['Pi_tilde']
        point.fields['p'] = wedge(power(point.field('e'), 3), point.fields['Pi_tilde']).scale(1.0 / 6.0)
    elif theory == 'ym':
        point.fields['B'] = point.fields['B_tilde']
        point.fields['rho'] = wedge(power(point.field('e'), 2), point.fields['B_tilde']).scale(0.5)
    if enforce:
        point = enforce_representative(point)
    logger.debug('sampled %r', point)
    return point


"""
Derivative identities
"""


def _identity_setup(seed, K, M, reference):
    rng = np.random.default_rng(seed)
    algebra = InternalAlgebra(4, form_dim=3)
    grid = TorusGrid(M)
    xi = random_vector_field(rng, algebra, K, grid, masks=(1, 2), amplitude=0.5)
    omega0 = random_section(rng, algebra, 1, 2, K, grid, amplitude=0.5 if reference else 0.0)
    omega = random_section(rng, algebra, 1, 2, K, grid, amplitude=0.5)
    return rng, algebra, grid, xi, omega0, omega


def _identity_spade(seed, K, M, reference, zero_xi):
    rng, algebra, grid, xi, omega0, _ = _identity_setup(seed, K, M, reference)
    if zero_xi:
        xi = xi.scale(0.0)
    A = random_section(rng, algebra, 2, 1, K, grid, amplitude=0.5)
    cov = CovariantDerivative(grid, omega=omega0)
    ixi = lambda a: iota_vector(xi, a)
    lhs = iota_vector(vector_bracket(xi, xi, grid), A).scale(0.5)
    rhs = (ixi(ixi(cov.d(A))).scale(-0.5) + ixi(cov.d(ixi(A))) - cov.d(ixi(ixi(A))).scale(0.5))
    return (lhs - rhs).max_abs()


def _identity_club(seed, K, M, reference, zero_xi):
    rng, algebra, grid, xi, omega0, _ = _identity_setup(seed, K, M, reference)
    if zero_xi:
        xi = xi.scale(0.0)
    B = random_section(rng, algebra, 1, 1, K, grid, amplitude=0.5)
    cov = CovariantDerivative(grid, omega=omega0)
    F0 = cov.curvature()
    lhs = cov.lie_derivative(xi, cov.lie_derivative(xi, B))
    rhs = (cov.lie_derivative(vector_bracket(xi, xi, grid), B).scale(0.5) +
           lie_bracket(iota_vector(xi, iota_vector(xi, F0)), B).scale(0.5))
    return (lhs - rhs).max_abs()


def _identity_heart(seed, K, M, reference, zero_xi):
    rng, algebra, grid, xi, omega0, omega = _identity_setup(seed, K, M, reference)
    cov0 = CovariantDerivative(grid, omega=omega0)
    cov = CovariantDerivative(grid, omega=omega)
    diff = omega0 - omega
    lhs = cov0.d(diff)
    rhs = cov0.curvature() - cov.curvature() + lie_bracket(diff, diff).scale(0.5)
    return (lhs - rhs).max_abs()


def _identity_triangle_up(seed, K, M, reference, zero_xi):
    rng, algebra, grid, xi, omega0, omega = _identity_setup(seed, K, M, reference)
    lie = LieAlgebra.from_name('su2')
    A = random_section(rng, algebra, 1, 0, K, grid, extra=(lie.dim, 1), amplitude=0.5)
    alpha = random_section(rng, algebra, 1, 0, K, grid, extra=(lie.dim, 1), amplitude=0.5)
    cov = CovariantDerivative(grid, A=A, lie=lie)
    F_A = cov.gauge_curvature()
    gauge = (cov.d(cov.d(alpha, 'lie'), 'lie') - lie.bracket(F_A, alpha)).max_abs()
    bianchi = cov.d(F_A, 'lie').max_abs()
    beta = random_section(rng, algebra, 1, 1, K, grid, amplitude=0.5)
    rotation = CovariantDerivative(grid, omega=omega)
    internal = (rotation.d(rotation.d(beta)) - lie_bracket(rotation.curvature(), beta)).max_abs()
    return max(gauge, bianchi, internal)


def _identity_lozenge(seed, K, M, reference, zero_xi):
    rng, algebra, grid, xi, omega0, omega = _identity_setup(seed, K, M, reference)
    if zero_xi:
        xi = xi.scale(0.0)
    rep = build_gamma(4, algebra.eta, exact=False)
    generators = spin_generators(algebra, rep.gammas)
    psi = random_section(rng, algebra, 0, 0, K, grid, extra=(4, 1), masks=(1 << 3,), amplitude=0.5,
                         complex_values=True)
    cov0 = CovariantDerivative(grid, omega=omega0, generators=generators)
    cov = CovariantDerivative(grid, omega=omega, generators=generators)
    lhs = cov0.lie_derivative(xi, cov.d(psi, 'psi'), 'psi')
    rhs = (-cov.d(cov0.lie_derivative(xi, psi, 'psi'), 'psi') +
           cov.act(cov0.connection_lie_derivative(xi, omega), psi, 'psi'))
    return (lhs - rhs).max_abs()


DERIVATIVE_IDENTITY_CATALOG = {
    '♠': _identity_spade,
    '♣': _identity_club,
    '♥': _identity_heart,
    '▲': _identity_triangle_up,
    '◆': _identity_lozenge,
}


def verify_derivative_identity(name, seed, K=1, M=16, reference=True, zero_xi=False):
    """Largest grid residual of LHS - RHS of a derivative identity on random fields."""
    if name not in DERIVATIVE_IDENTITY_CATALOG:
        raise StructuralError('unknown derivative identity {}'.format(name))
    residual = float(DERIVATIVE_IDENTITY_CATALOG[name](seed, K, M, reference, zero_xi))
    logger.debug('derivative identity %s seed %d: residual %.3e', name, seed, residual)
    return residual


def verify_convolution_backend(seed, K=1, M=16):
    """Grid products, derivatives and integrals against exact coefficient convolution."""
    grid = TorusGrid(M)
    rng = np.random.default_rng([seed, 4])
    p = TrigPoly.random(rng, K, (2,), real=True)
    q = TrigPoly.random(rng, K, (2,), real=True)
    product = p * q
    grid.check(product.bandwidth, 'convolution product')
    on_grid = p.realize(grid) * q.realize(grid)
    residuals = [np.max(np.abs(on_grid - product.realize(grid)))]
    for axis in range(grid.form_dim):
        spectral = grid.derivative(on_grid[..., None, None, None], axis)[..., 0, 0, 0]
        residuals.append(np.max(np.abs(spectral - product.derivative(axis).realize(grid))))
    residuals.append(np.max(np.abs(grid.integral(on_grid) - product.integral())) / TWO_PI_CUBED)
    residual = float(max(residuals))
    logger.debug('convolution backend seed %d K %d M %d: residual %.3e', seed, K, M, residual)
    return residual
