#!/usr/bin/env python3

"""
Clifford

Clifford algebra Cl(V, eta) on the ordered-subset basis, the Dirac gamma
representation, Spin elements presented as products of unit vectors, the
double covering l : Spin -> SO(eta) and its differential on the spin Lie
algebra, plus the gamma identities used by the spinor theory.

The Clifford product follows v w + w v = -2 eta(v, w) 1, so a unit vector
squares to -eta(v, v).

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

import itertools
import logging
import math
from functools import lru_cache

import numpy as np
from sympy import Rational
from sympy.polys.domains import QQ

from engine.errors import StructuralError
from engine.galg import (InternalAlgebra, MixedForm, FormSampler, array_max_abs, conjugate_array, exact_complex,
                         exact_determinant, gamma_form, j_internal, lie_bracket, magnitude,
                         spin_generators, to_complex, to_exact_array, wedge)

logger = logging.getLogger(__name__)

PAULI = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


"""
Helpers
"""


@lru_cache(maxsize=None)
def _blade_product(b1, b2, eta):
    """Clifford product of two basis blades: (coefficient, blade)."""
    sequence = list(b1 + b2)
    sign = 1
    # bubble sort, each swap of distinct generators flips the sign
    for end in range(len(sequence) - 1, 0, -1):
        for k in range(end):
            if sequence[k] > sequence[k + 1]:
                sequence[k], sequence[k + 1] = sequence[k + 1], sequence[k]
                sign = -sign
    out = []
    k = 0
    while k < len(sequence):
        if k + 1 < len(sequence) and sequence[k] == sequence[k + 1]:
            sign *= -eta[sequence[k]]
            k += 2
        else:
            out.append(sequence[k])
            k += 1
    return sign, tuple(out)


def _kron(*factors):
    out = np.eye(1, dtype=complex)
    for factor in factors:
        out = np.kron(out, factor)
    return out


"""
Clifford elements
"""


class CliffordElement:
    """Element of Cl(V, eta) stored as blade -> coefficient.

    Attributes
    ----------
    N : int
    eta : tuple
    components : dict
        Sorted index tuple -> coefficient (QQ for exact work, float otherwise).

    Methods
    -------
    vector(coefficients, eta)
        Grade one element sum_a c^a v_a.
    grade_involution()
        The grading map alpha, (-1)^k on grade k.
    transpose()
        Reverses the order of factors, (-1)^(k(k-1)/2) on grade k.
    grade(k)
        Grade k part.
    """

    def __init__(self, eta, components=None):
        self.eta = tuple(eta)
        self.N = len(self.eta)
        self.components = {tuple(k): v for k, v in (components or {}).items()}

    @classmethod
    def scalar(cls, eta, value):
        return cls(eta, {(): value})

    @classmethod
    def vector(cls, coefficients, eta):
        return cls(eta, {(a,): c for a, c in enumerate(coefficients) if magnitude(c) != 0})

    def __repr__(self):
        return 'CliffordElement({})'.format(self.components)

    def _check(self, other):
        if not isinstance(other, CliffordElement) or other.eta != self.eta:
            raise StructuralError('mismatched Clifford algebras')

    def __add__(self, other):
        self._check(other)
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = out[k] + v if k in out else v
        return CliffordElement(self.eta, out)

    def __neg__(self):
        return CliffordElement(self.eta, {k: -v for k, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        return CliffordElement(self.eta, {k: v * factor for k, v in self.components.items()})

    def __mul__(self, other):
        if not isinstance(other, CliffordElement):
            return self.scale(other)
        self._check(other)
        out = {}
        for b1, v1 in self.components.items():
            for b2, v2 in other.components.items():
                sign, blade = _blade_product(b1, b2, self.eta)
                value = v1 * v2 if sign == 1 else -(v1 * v2)
                out[blade] = out[blade] + value if blade in out else value
        return CliffordElement(self.eta, out)

    def grade_involution(self):
        return CliffordElement(self.eta, {k: (-v if len(k) % 2 else v) for k, v in self.components.items()})

    def transpose(self):
        return CliffordElement(self.eta, {k: (-v if (len(k) * (len(k) - 1) // 2) % 2 else v)
                                          for k, v in self.components.items()})

    def grade(self, k):
        return CliffordElement(self.eta, {b: v for b, v in self.components.items() if len(b) == k})

    def is_even(self):
        return all(len(b) % 2 == 0 or magnitude(v) == 0 for b, v in self.components.items())

    def scalar_part(self):
        return self.components.get((), 0)

    def vector_part(self):
        return [self.components.get((a,), 0) for a in range(self.N)]

    def max_abs(self):
        return max((magnitude(v) for v in self.components.values()), default=0.0)

    def commutator(self, other):
        return self * other - other * self

    def exp(self, terms=24):
        """Truncated power series, float coefficients."""
        result = CliffordElement.scalar(self.eta, 1.0)
        power = CliffordElement.scalar(self.eta, 1.0)
        for n in range(1, terms):
            power = (power * self).scale(1.0 / n)
            result = result + power
        return result


def bivector(eta, a, b, value=1):
    """v_ab = 1/4 [v_a, v_b] = 1/2 v_a v_b for a != b."""
    va = CliffordElement.vector([1 if k == a else 0 for k in range(len(eta))], eta)
    vb = CliffordElement.vector([1 if k == b else 0 for k in range(len(eta))], eta)
    quarter = QQ(value, 4) if isinstance(value, int) else value / 4
    return va.commutator(vb).scale(quarter)


"""
Spin elements and the covering map
"""


class SpinElement:
    """Even Clifford element with a cached inverse.

    Built from unit vectors (eta(v, v) = +-1) with an even count, or from an
    explicit (element, inverse) pair such as exp(t x), exp(-t x).
    """

    def __init__(self, element, inverse):
        if not element.is_even():
            raise StructuralError('spin element must be even')
        self.element = element
        self.inverse = inverse

    @classmethod
    def from_vectors(cls, vectors, eta, exact=True):
        if len(vectors) % 2:
            raise StructuralError('spin element needs an even number of unit vectors')
        element = CliffordElement.scalar(eta, QQ(1) if exact else 1.0)
        inverse = CliffordElement.scalar(eta, QQ(1) if exact else 1.0)
        for v in vectors:
            norm = sum(eta[a] * v[a] * v[a] for a in range(len(eta)))
            if magnitude(norm - 1) > (0 if exact else 1e-12) and magnitude(norm + 1) > (0 if exact else 1e-12):
                raise StructuralError('generating vector is not a unit vector, eta(v,v) = {}'.format(norm))
            vec = CliffordElement.vector(v, eta)
            element = element * vec
            # v^-1 = -v / eta(v, v)
            inverse = vec.scale(-1 / norm if not exact else QQ(-1) / norm) * inverse
        return cls(element, inverse)

    def __mul__(self, other):
        return SpinElement(self.element * other.element, other.inverse * self.inverse)

    def __neg__(self):
        return SpinElement(-self.element, -self.inverse)


def covering_map(spin):
    """Matrix of l(S)(w) = alpha(S) w S^-1 on the basis v_b (column b)."""
    eta = spin.element.eta
    N = len(eta)
    exact = any(not isinstance(v, (int, float, complex)) for v in spin.element.components.values())
    out = np.zeros((N, N), dtype=object if exact else float)
    image_of = spin.element.grade_involution()
    for b in range(N):
        w = CliffordElement.vector([1 if k == b else 0 for k in range(N)], eta)
        image = image_of * w * spin.inverse
        for d, value in enumerate(image.vector_part()):
            out[d, b] = value
    return out


def so_matrix_formula(eta, a, b):
    """Printed matrix of l'(v_ab): entries delta^d_b eta_ac - delta^d_a eta_bc."""
    N = len(eta)
    out = np.zeros((N, N), dtype=int)
    for d in range(N):
        for c in range(N):
            out[d, c] = (1 if d == b else 0) * (eta[a] if a == c else 0) - \
                (1 if d == a else 0) * (eta[b] if b == c else 0)
    return out


def spin_lie_iso(coefficients, eta):
    """so-matrix of the bivector sum_k a^k v_(ab)_k through w -> [x, w]."""
    N = len(eta)
    pairs = list(itertools.combinations(range(N), 2))
    x = None
    for (a, b), value in zip(pairs, coefficients):
        if magnitude(value) == 0:
            continue
        term = bivector(eta, a, b).scale(value)
        x = term if x is None else x + term
    out = np.zeros((N, N), dtype=object if _any_exact(coefficients) else float)
    if x is None:
        return out
    for c in range(N):
        w = CliffordElement.vector([1 if k == c else 0 for k in range(N)], eta)
        for d, value in enumerate(x.commutator(w).vector_part()):
            out[d, c] = value
    return out


def _any_exact(values):
    return any(not isinstance(v, (int, float, complex, np.number)) for v in values)


def random_unit_vector(rng, eta, timelike):
    """Rational unit vector: eta(v, v) = -1 if timelike else +1."""
    s, t = (Rational(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(2))
    denominator = 1 + s * s + t * t
    direction = [2 * s / denominator, 2 * t / denominator, (s * s + t * t - 1) / denominator]
    r = Rational(int(rng.integers(2, 6)), int(rng.integers(1, 4)))
    cosh = (r + 1 / r) / 2
    sinh = (r - 1 / r) / 2
    time, scale = (cosh, sinh) if timelike else (sinh, cosh)
    timelike_index = eta.index(-1)
    spatial = iter(direction)
    vector = []
    for a in range(len(eta)):
        if a == timelike_index:
            vector.append(QQ.from_sympy(time))
        else:
            component = next(spatial, Rational(0))
            vector.append(QQ.from_sympy(scale * component))
    return vector


"""
Gamma representation
"""


class GammaRep:
    """Dirac matrices gamma_a with {gamma_a, gamma_b} = -2 eta_ab Id.

    Attributes
    ----------
    N : int
    eta : tuple
    gammas : ndarray
        (N, 2^m, 2^m) lower-index matrices, complex128 or QQ_I objects.
    chirality : ndarray
        gamma_(2m+1) = phase * gamma_0 ... gamma_(N-1), squaring to Id.
    exact : bool
    """

    def __init__(self, N, eta, gammas, chirality, exact):
        self.N = N
        self.eta = eta
        self.gammas = gammas
        self.chirality = chirality
        self.exact = exact

    @property
    def size(self):
        return self.gammas.shape[-1]

    def identity(self):
        return _identity(self.size, self.exact)

    def anticommutator_residual(self):
        worst = 0.0
        for a in range(self.N):
            for b in range(a, self.N):
                anti = self.gammas[a] @ self.gammas[b] + self.gammas[b] @ self.gammas[a]
                target = self.identity() * (-2 * (self.eta[a] if a == b else 0))
                worst = max(worst, array_max_abs(anti - target))
        return worst

    def adjoint_residual(self):
        g0 = self.gammas[0]
        return max(array_max_abs(g0 @ conjugate_array(g.T) @ g0 - g) for g in self.gammas)

    def trace_residual(self):
        return max(magnitude(np.trace(g)) for g in self.gammas)

    def chirality_dims(self):
        """Dimensions of the +1 and -1 eigenspaces of the chirality element."""
        trace = to_complex(np.trace(self.chirality))
        plus = int(round((self.size + trace.real) / 2))
        return plus, self.size - plus

    def chirality_square_residual(self):
        return array_max_abs(self.chirality @ self.chirality - self.identity())


def _identity(size, exact):
    if exact:
        return to_exact_array(np.eye(size), complex_values=True)
    return np.eye(size, dtype=complex)


def build_gamma(N=4, eta=None, exact=False):
    """Gamma matrices from the Pauli tensor construction.

    The construction gives Euclidean generators E_1..E_N with
    {E_k, E_l} = 2 delta_kl.  The timelike gamma is E_1 itself and the
    spacelike gammas are i E_k, which yields {gamma_a, gamma_b} = -2 eta_ab
    and gamma_0 gamma_a^dagger gamma_0 = gamma_a.
    """
    if N % 2 or N not in (2, 4, 6):
        raise StructuralError('gamma representation needs N in (2, 4, 6), got {}'.format(N))
    if eta is None:
        eta = (-1,) + (1,) * (N - 1)
    eta = tuple(eta)
    m = N // 2
    euclidean = []
    for j in range(m):
        for pauli in (1, 2):
            factors = [PAULI[0]] * j + [PAULI[pauli]] + [PAULI[3]] * (m - j - 1)
            euclidean.append(_kron(*factors))
    timelike = eta.index(-1)
    gammas = []
    spatial = iter(euclidean[1:])
    for a in range(N):
        gammas.append(euclidean[0] if a == timelike else 1j * next(spatial))
    gammas = np.stack(gammas)
    product = _kron(*([PAULI[0]] * m))
    for g in gammas:
        product = product @ g
    square = (product @ product)[0, 0]
    phase = 1 if square.real > 0 else 1j
    chirality = phase * product
    logger.debug('gamma representation N=%d, chirality phase %s', N, phase)
    if exact:
        gammas = to_exact_array(gammas, complex_values=True)
        chirality = to_exact_array(chirality, complex_values=True)
    return GammaRep(N, eta, gammas, chirality, exact)


def check_dcov_gamma(omega, rep):
    """Residual of d_omega gamma for constant gamma.

    The term [omega, gamma] combines the vector action omega^b_c gamma^c with
    the spinor commutator -1/4 omega^ac (gamma_a gamma_c gamma^b - gamma^b gamma_a gamma_c).
    """
    algebra = omega.algebra
    gamma = gamma_form(algebra, rep.gammas)
    generators = spin_generators(algebra, rep.gammas)
    return lie_bracket(omega, gamma, spin='gamma', generators=generators).max_abs()


def check_triangle_basis(rep):
    """Residual of j_g j_g c g = g j_g j_g c + 4 [c, g] over the basis bivectors c."""
    algebra = InternalAlgebra(rep.N, form_dim=3, eta=rep.eta)
    gamma = gamma_form(algebra, rep.gammas)
    worst = 0.0
    for k in range(algebra.internal_size(2)):
        array = np.zeros((1, algebra.internal_size(2), 1, 1), dtype=object if rep.exact else complex)
        array[0, k, 0, 0] = exact_complex(1) if rep.exact else 1.0
        c = MixedForm(algebra, 0, 2, {0: array})
        jjc = j_internal(gamma, j_internal(gamma, c))
        four = exact_complex(4) if rep.exact else 4.0
        residual = wedge(jjc, gamma) - wedge(gamma, jjc) - lie_bracket(c, gamma).scale(four)
        worst = max(worst, residual.max_abs())
    return worst


def check_bracket_iso(algebra):
    """Compare lie_bracket on basis pairs with -l'(v_ab) from the Clifford commutator."""
    worst = 0
    for k, (a, b) in enumerate(algebra.internal_basis[2]):
        coefficients = [QQ(1) if n == k else QQ(0) for n in range(algebra.internal_size(2))]
        matrix = spin_lie_iso(coefficients, algebra.eta)
        formula = so_matrix_formula(algebra.eta, a, b)
        worst = max(worst, array_max_abs(matrix - formula))
        alpha = np.zeros((1, algebra.internal_size(2), 1, 1), dtype=object)
        alpha[0, k, 0, 0] = QQ(1)
        alpha_form = MixedForm(algebra, 0, 2, {0: alpha})
        for c in range(algebra.N):
            vec = np.zeros((1, algebra.N, 1, 1), dtype=object)
            vec[0, c, 0, 0] = QQ(1)
            image = lie_bracket(alpha_form, MixedForm(algebra, 0, 1, {0: vec}))
            got = image.comps.get(0, np.zeros((1, algebra.N, 1, 1), dtype=object))[0, :, 0, 0]
            worst = max(worst, array_max_abs(got + matrix[:, c]))
    return worst


"""
Invariant checks
"""


def _random_spin(rng, eta, count):
    vectors = [random_unit_vector(rng, eta, timelike=bool(rng.integers(0, 2))) for _ in range(count)]
    return SpinElement.from_vectors(vectors, eta)


def clifford_invariants(seed, N=4):
    """Residuals of every Clifford check for one seed, keyed by check id."""
    rng = np.random.default_rng(seed)
    eta = (-1,) + (1,) * (N - 1)
    results = {}

    rep = build_gamma(N, exact=True)
    results['anticommutator'] = rep.anticommutator_residual()
    results['adjoint'] = rep.adjoint_residual()
    results['trace'] = rep.trace_residual()
    results['chirality-square'] = rep.chirality_square_residual()
    plus, minus = rep.chirality_dims()
    results['chirality-dims'] = float(abs(plus - minus))

    def random_element():
        out = CliffordElement(eta)
        for size in range(N + 1):
            for blade in itertools.combinations(range(N), size):
                out = out + CliffordElement(eta, {blade: QQ(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))})
        return out

    x, y, z = random_element(), random_element(), random_element()
    results['associativity'] = ((x * y) * z - x * (y * z)).max_abs()
    results['involution'] = (x.grade_involution().grade_involution() - x).max_abs()
    results['transpose'] = max((x.transpose().transpose() - x).max_abs(),
                               (x.transpose().grade_involution() - x.grade_involution().transpose()).max_abs())

    s1, s2 = _random_spin(rng, eta, 2), _random_spin(rng, eta, 2)
    l1, l2 = covering_map(s1), covering_map(s2)
    metric = np.diag(eta).astype(object)
    results['covering-so'] = max(array_max_abs(l1.T.dot(metric).dot(l1) - metric),
                                 magnitude(exact_determinant(l1) - 1))
    results['covering-homomorphism'] = array_max_abs(covering_map(s1 * s2) - l1.dot(l2))
    results['covering-2to1'] = array_max_abs(covering_map(-s1) - l1)

    algebra = InternalAlgebra(N, form_dim=3)
    results['spin-lie-iso'] = check_bracket_iso(algebra)
    results['spin-lie-derivative'] = _finite_difference_residual(rng, eta)

    sampler = FormSampler(rng, exact=True, complex_values=True)
    omega = sampler.homogeneous(algebra, 1, 2, 0, ())
    results['dcov-gamma'] = check_dcov_gamma(omega, rep)
    results['triangle-basis'] = check_triangle_basis(rep)
    return results


def _finite_difference_residual(rng, eta, step=1e-6):
    coefficients = [float(v) for v in rng.standard_normal(math.comb(len(eta), 2))]
    x = None
    for (a, b), value in zip(itertools.combinations(range(len(eta)), 2), coefficients):
        term = bivector(eta, a, b, value=1.0).scale(value)
        x = term if x is None else x + term
    forward = SpinElement(x.scale(step).exp(), x.scale(-step).exp())
    backward = SpinElement(x.scale(-step).exp(), x.scale(step).exp())
    derivative = (covering_map(forward) - covering_map(backward)) / (2 * step)
    expected = spin_lie_iso(coefficients, eta).astype(float)
    return float(np.max(np.abs(derivative - expected)))
