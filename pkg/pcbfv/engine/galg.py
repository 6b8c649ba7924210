#!/usr/bin/env python3

"""
Graded algebra

Pointwise exterior algebra of mixed (differential, internal) degree with
Grassmann coefficients: MixedForm, GrassmannScalar, the internal algebra
Lambda^j V with its so(N-1,1) action, the wedge product, the internal
product, contractions, and the catalog of pointwise identities.

Every element is stored as a dictionary mask -> coefficient array, one
entry per monomial theta^m of Grassmann generators.  A coefficient array has
shape batch + (n_forms, n_internal, r, s): batch is () at a single point or
the grid shape for fields, and the trailing (r, s) carries matrix values
(1x1 for ordinary forms, spinor columns and rows, gamma matrices, Lie
algebra components).

Monomials are written in the order theta^m dx^I v_J.  The grading is a
single Z2 grading in which theta, dx and v are all odd; the sign of every
reordering follows from that rule and from the lexicographic bases.

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
from sympy import Matrix, Rational, I as sympy_I
from sympy.polys.domains import QQ, QQ_I

from engine.errors import StructuralError, UnsupportedPairingError, DegeneracyError

logger = logging.getLogger(__name__)


"""
Helpers
"""


def popcount(mask):
    return bin(mask).count('1')


@lru_cache(maxsize=None)
def merge_sign(m1, m2):
    """Sign of theta^m1 theta^m2 relative to theta^(m1|m2); 0 if they overlap.

    Generators are odd, so the sign counts the transpositions needed to sort
    the merged monomial; see _wedge2 for the form and internal factors.
    """
    if m1 & m2:
        return 0
    sign = 1
    rest = m2
    while rest:
        low = rest & -rest
        position = low.bit_length() - 1
        if popcount(m1 >> (position + 1)) % 2:
            sign = -sign
        rest ^= low
    return sign


def permutation_sign(sequence):
    """Return (sign, sorted tuple) of a sequence of indices, sign 0 on repeats."""
    if len(set(sequence)) != len(sequence):
        return 0, None
    inversions = 0
    for a, b in itertools.combinations(range(len(sequence)), 2):
        if sequence[a] > sequence[b]:
            inversions += 1
    return (-1 if inversions % 2 else 1), tuple(sorted(sequence))


def magnitude(value):
    if hasattr(value, 'x') and hasattr(value, 'y'):
        return abs(complex(float(value.x), float(value.y)))
    try:
        return abs(complex(value))
    except TypeError:
        return abs(float(value))


_magnitudes = np.vectorize(magnitude, otypes=[float])


def array_max_abs(array):
    array = np.asarray(array)
    if array.size == 0:
        return 0.0
    if array.dtype == object:
        return float(np.max(_magnitudes(array)))
    return float(np.max(np.abs(array)))


def is_exact(array):
    return np.asarray(array).dtype == object


def exact_rational(p, q=1):
    return QQ(int(p), int(q))


def exact_complex(re, im=0):
    return QQ_I.from_sympy(Rational(re) + sympy_I * Rational(im))


def to_rational(value):
    if hasattr(value, 'numerator'):
        return Rational(int(value.numerator), int(value.denominator))
    return Rational(value)


def exact_conjugate(value):
    """Complex conjugate of a QQ_I entry; QQ entries are returned unchanged."""
    if _is_gaussian(value):
        return exact_complex(to_rational(value.x), -to_rational(value.y))
    return value


_conjugates = np.vectorize(exact_conjugate, otypes=[object])


def conjugate_array(array):
    array = np.asarray(array)
    if array.dtype == object:
        return _conjugates(array) if array.size else array.copy()
    return np.conj(array)


def to_exact_array(array, complex_values=False):
    """Convert an integer or Gaussian-integer numpy array to QQ / QQ_I entries."""
    array = np.asarray(array)
    out = np.empty(array.shape, dtype=object)
    for index, value in np.ndenumerate(array):
        if complex_values:
            value = complex(value)
            out[index] = exact_complex(Rational(value.real), Rational(value.imag))
        else:
            out[index] = QQ.from_sympy(Rational(float(value)))
    return out


def exact_inverse(matrix):
    """Exact inverse of a square object array of QQ entries."""
    size = matrix.shape[0]
    sym = Matrix(size, size, lambda r, c: to_rational(matrix[r, c]))
    if sym.det() == 0:
        raise DegeneracyError('singular matrix in exact inverse')
    inverse = sym.inv()
    out = np.empty((size, size), dtype=object)
    for r in range(size):
        for c in range(size):
            out[r, c] = QQ.from_sympy(inverse[r, c])
    return out


def exact_determinant(matrix):
    size = matrix.shape[0]
    sym = Matrix(size, size, lambda r, c: to_rational(matrix[r, c]))
    return QQ.from_sympy(sym.det())


def _extra_mul(a, b):
    if a.shape[-2:] == (1, 1) or b.shape[-2:] == (1, 1):
        return a * b
    return np.matmul(a, b)


def _one_hot(source_count, target_count, targets, signs, exact):
    matrix = np.zeros((source_count, target_count), dtype=object if exact else float)
    for row, (target, sign) in enumerate(zip(targets, signs)):
        matrix[row, target] += int(sign)
    return matrix


def _accumulate(comps, mask, array):
    if mask in comps:
        comps[mask] = comps[mask] + array
    else:
        comps[mask] = array


def _combine_bandwidth(*bandwidths):
    total = 0
    for bw in bandwidths:
        if bw is None:
            return None
        total += bw
    return total


def _max_bandwidth(*bandwidths):
    if any(bw is None for bw in bandwidths):
        return None
    return max(bandwidths)


def _sum_ghost(*ghosts):
    if any(g is None for g in ghosts):
        return None
    return sum(ghosts)


"""
Internal algebra
"""


class InternalAlgebra:
    """Exterior algebra of the internal space V together with the form space.

    Attributes
    ----------
    N : int
        Dimension of V.
    form_dim : int
        Dimension of the manifold carrying the differential forms (3 on the
        boundary, N in the bulk).
    eta : tuple
        Diagonal of the Minkowski metric, exactly one entry -1.
    internal_basis, form_basis : list of list of tuple
        Lexicographically ordered bases of Lambda^j V and Lambda^i T*.

    Methods
    -------
    form_table(d1, d2), internal_table(d1, d2)
        Index and sign tables of the exterior product.
    gram(j)
        Diagonal of the internal product on Lambda^j V.
    action_matrices(j)
        Matrices of the so(N-1,1) action of each basis bivector on Lambda^j V.
    contraction_table(j)
        Tables for the left contraction Lambda^j V -> Lambda^(j-1) V.
    interior_table(i, k)
        Table of the contraction of dx^k from i-forms.
    """

    def __init__(self, N=4, form_dim=3, eta=None):
        if eta is None:
            eta = (-1,) + (1,) * (N - 1)
        eta = tuple(int(x) for x in eta)
        if len(eta) != N or any(x not in (-1, 1) for x in eta) or eta.count(-1) != 1:
            raise StructuralError('eta must be diagonal with a single timelike entry: {}'.format(eta))
        self.N = N
        self.form_dim = form_dim
        self.eta = eta
        self.internal_basis = [list(itertools.combinations(range(N), j)) for j in range(N + 1)]
        self.form_basis = [list(itertools.combinations(range(form_dim), i)) for i in range(form_dim + 1)]
        self._internal_index = [{b: n for n, b in enumerate(basis)} for basis in self.internal_basis]
        self._form_index = [{b: n for n, b in enumerate(basis)} for basis in self.form_basis]
        self._cache = {}

    def __eq__(self, other):
        return (isinstance(other, InternalAlgebra) and self.N == other.N and
                self.form_dim == other.form_dim and self.eta == other.eta)

    def __hash__(self):
        return hash((self.N, self.form_dim, self.eta))

    def __repr__(self):
        return 'InternalAlgebra(N={}, form_dim={}, eta={})'.format(self.N, self.form_dim, self.eta)

    def form_size(self, i):
        return math.comb(self.form_dim, i) if 0 <= i <= self.form_dim else 0

    def internal_size(self, j):
        return math.comb(self.N, j) if 0 <= j <= self.N else 0

    def internal_index(self, j, blade):
        return self._internal_index[j][tuple(blade)]

    def form_index(self, i, blade):
        return self._form_index[i][tuple(blade)]

    def _product_table(self, key, bases, index, d1, d2):
        if key in self._cache:
            return self._cache[key]
        src1, src2, dst, sign = [], [], [], []
        if d1 + d2 < len(bases):
            for n1, b1 in enumerate(bases[d1]):
                for n2, b2 in enumerate(bases[d2]):
                    s, merged = permutation_sign(b1 + b2)
                    if s:
                        src1.append(n1)
                        src2.append(n2)
                        dst.append(index[d1 + d2][merged])
                        sign.append(s)
        table = tuple(np.array(x, dtype=int) for x in (src1, src2, dst, sign))
        self._cache[key] = table
        return table

    def form_table(self, d1, d2):
        return self._product_table(('form', d1, d2), self.form_basis, self._form_index, d1, d2)

    def internal_table(self, d1, d2):
        return self._product_table(('internal', d1, d2), self.internal_basis, self._internal_index, d1, d2)

    def gram(self, j):
        key = ('gram', j)
        if key not in self._cache:
            self._cache[key] = np.array([int(np.prod([self.eta[a] for a in blade])) if blade else 1
                                         for blade in self.internal_basis[j]], dtype=int)
        return self._cache[key]

    def action_matrices(self, j):
        """R[k, J', J]: coefficient of v_J' in [v_a ^ v_b, v_J] for bivector k = (a, b)."""
        key = ('action', j)
        if key in self._cache:
            return self._cache[key]
        size = self.internal_size(j)
        bivectors = self.internal_basis[2]
        matrices = np.zeros((len(bivectors), size, size), dtype=int)
        for k, (a, b) in enumerate(bivectors):
            for col, blade in enumerate(self.internal_basis[j]):
                for pos, s in enumerate(blade):
                    # M_ab v_s = eta(v_b, v_s) v_a - eta(v_a, v_s) v_b
                    for replacement, coef in ((a, self.eta[b] if s == b else 0),
                                              (b, -self.eta[a] if s == a else 0)):
                        if not coef:
                            continue
                        new = blade[:pos] + (replacement,) + blade[pos + 1:]
                        sign, merged = permutation_sign(new)
                        if sign:
                            matrices[k, self._internal_index[j][merged], col] += coef * sign
        self._cache[key] = matrices
        return matrices

    def contraction_table(self, j):
        """(src, dst, vector index, sign) of the left contraction on Lambda^j V."""
        key = ('contract', j)
        if key in self._cache:
            return self._cache[key]
        src, dst, vec, sign = [], [], [], []
        for n, blade in enumerate(self.internal_basis[j]):
            for r, c in enumerate(blade):
                src.append(n)
                dst.append(self._internal_index[j - 1][blade[:r] + blade[r + 1:]])
                vec.append(c)
                sign.append((-1) ** r * self.eta[c])
        table = tuple(np.array(x, dtype=int) for x in (src, dst, vec, sign))
        self._cache[key] = table
        return table

    def interior_table(self, i, k):
        """(src, dst, sign) of the contraction of the coordinate vector d/dx^k."""
        key = ('interior', i, k)
        if key in self._cache:
            return self._cache[key]
        src, dst, sign = [], [], []
        for n, blade in enumerate(self.form_basis[i]):
            if k in blade:
                r = blade.index(k)
                src.append(n)
                dst.append(self._form_index[i - 1][blade[:r] + blade[r + 1:]])
                sign.append((-1) ** r)
        table = tuple(np.array(x, dtype=int) for x in (src, dst, sign))
        self._cache[key] = table
        return table

    def volume_index(self):
        return self.form_size(self.form_dim) - 1


"""
Grassmann scalars
"""


class GrassmannScalar:
    """Element of a finite Grassmann algebra with numeric coefficients.

    Components are stored as mask -> number with the generators of each
    mask in increasing order.  Products carry the reordering sign, so
    theta_k theta_k = 0 and theta_j theta_k = -theta_k theta_j.
    """

    __slots__ = ('comps',)

    def __init__(self, comps=None):
        self.comps = dict(comps or {})

    @classmethod
    def generator(cls, k, value=1):
        return cls({1 << k: value})

    @classmethod
    def constant(cls, value):
        return cls({0: value})

    def __repr__(self):
        terms = ['{}*{}'.format(v, _mask_name(m)) for m, v in sorted(self.comps.items())]
        return 'GrassmannScalar({})'.format(' + '.join(terms) if terms else '0')

    def __getitem__(self, mask):
        return self.comps.get(mask, 0)

    def masks(self):
        return sorted(self.comps)

    def __add__(self, other):
        other = _as_grassmann(other)
        out = dict(self.comps)
        for m, v in other.comps.items():
            out[m] = out[m] + v if m in out else v
        return GrassmannScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannScalar({m: -v for m, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-_as_grassmann(other))

    def __rsub__(self, other):
        return _as_grassmann(other) - self

    def __mul__(self, other):
        if not isinstance(other, GrassmannScalar):
            return GrassmannScalar({m: v * other for m, v in self.comps.items()})
        out = {}
        for m1, v1 in self.comps.items():
            for m2, v2 in other.comps.items():
                s = merge_sign(m1, m2)
                if s:
                    value = v1 * v2 if s == 1 else -(v1 * v2)
                    out[m1 | m2] = out[m1 | m2] + value if (m1 | m2) in out else value
        return GrassmannScalar(out)

    def __rmul__(self, other):
        return GrassmannScalar({m: other * v for m, v in self.comps.items()})

    def parity(self):
        parities = {popcount(m) % 2 for m, v in self.comps.items() if magnitude(v) != 0}
        if len(parities) > 1:
            raise StructuralError('inhomogeneous Grassmann scalar has no parity')
        return parities.pop() if parities else 0

    def body(self):
        return self.comps.get(0, 0)

    def max_abs(self):
        return max((magnitude(v) for v in self.comps.values()), default=0.0)

    def strip(self, bits):
        """Coefficient Y of theta^bits Y, for masks containing all of bits."""
        out = {}
        for m, v in self.comps.items():
            if m & bits == bits:
                rest = m ^ bits
                s = merge_sign(bits, rest)
                out[rest] = v if s == 1 else -v
        return GrassmannScalar(out)

    def pruned(self, tol=0.0):
        return GrassmannScalar({m: v for m, v in self.comps.items() if magnitude(v) > tol})

    def inner(self, other):
        """Hermitian inner product over the union of monomials."""
        return sum((np.conj(to_complex(self[m])) * to_complex(other[m])
                    for m in set(self.comps) | set(other.comps)), 0j)

    def as_dict(self):
        out = {}
        for m, v in sorted(self.comps.items()):
            c = to_complex(v)
            out[_mask_name(m)] = [c.real, c.imag]
        return out


def _is_gaussian(value):
    return hasattr(value, 'x') and hasattr(value, 'y')


def to_complex(value):
    if _is_gaussian(value):
        return complex(float(value.x), float(value.y))
    return complex(value)


def _mask_name(mask):
    if mask == 0:
        return '1'
    return ''.join('t{}'.format(k) for k in range(mask.bit_length()) if mask >> k & 1)


def _as_grassmann(value):
    if isinstance(value, GrassmannScalar):
        return value
    return GrassmannScalar.constant(value)


"""
Mixed forms
"""


class MixedForm:
    """Element of Omega^(i,j) with Grassmann coefficients.

    Attributes
    ----------
    algebra : InternalAlgebra
    i, j : int
        Form degree and internal degree.
    comps : dict
        mask -> array of shape batch + (C(form_dim, i), C(N, j), r, s).
    ghost : int or None
        Ghost number, added under wedge; None when inhomogeneous.
    bandwidth : int or None
        Trigonometric bandwidth of the coefficients; None when the
        coefficients are not band limited.
    """

    __slots__ = ('algebra', 'i', 'j', 'comps', 'ghost', 'bandwidth')

    def __init__(self, algebra, i, j, comps=None, ghost=0, bandwidth=0):
        if i < 0 or j < 0:
            raise StructuralError('negative degree ({}, {})'.format(i, j))
        self.algebra = algebra
        self.i = i
        self.j = j
        self.comps = dict(comps or {})
        self.ghost = ghost
        self.bandwidth = bandwidth

    def __repr__(self):
        return 'MixedForm(i={}, j={}, masks={}, ghost={}, bandwidth={})'.format(
            self.i, self.j, [_mask_name(m) for m in sorted(self.comps)], self.ghost, self.bandwidth)

    @classmethod
    def zero(cls, algebra, i, j, ghost=0):
        return cls(algebra, i, j, {}, ghost=ghost, bandwidth=0)

    @classmethod
    def from_array(cls, algebra, i, j, array, mask=0, ghost=0, bandwidth=0, extra=None):
        array = np.asarray(array)
        if extra is None:
            array = array[..., None, None]
        expected = (algebra.form_size(i), algebra.internal_size(j))
        if array.shape[-4:-2] != expected:
            raise StructuralError('coefficient shape {} does not match degrees ({}, {})'.format(
                array.shape, i, j))
        return cls(algebra, i, j, {mask: array}, ghost=ghost, bandwidth=bandwidth)

    def same_shape(self, comps, ghost=None, bandwidth=None):
        return MixedForm(self.algebra, self.i, self.j, comps,
                         ghost=self.ghost if ghost is None else ghost,
                         bandwidth=self.bandwidth if bandwidth is None else bandwidth)

    @property
    def shape(self):
        return (self.algebra.form_size(self.i), self.algebra.internal_size(self.j))

    @property
    def extra(self):
        for array in self.comps.values():
            return array.shape[-2:]
        return (1, 1)

    @property
    def batch(self):
        shapes = [array.shape[:-4] for array in self.comps.values()]
        return np.broadcast_shapes(*shapes) if shapes else ()

    @property
    def exact(self):
        return any(a.dtype == object for a in self.comps.values())

    def is_empty(self):
        return self.algebra.form_size(self.i) == 0 or self.algebra.internal_size(self.j) == 0

    def mask_parity(self, mask):
        return (self.i + self.j + popcount(mask)) % 2

    def parity(self):
        parities = {self.mask_parity(m) for m in self.comps}
        if len(parities) > 1:
            raise StructuralError('inhomogeneous form has no parity')
        return parities.pop() if parities else (self.i + self.j) % 2

    def grassmann_parity(self):
        parities = {popcount(m) % 2 for m in self.comps}
        if len(parities) > 1:
            raise StructuralError('inhomogeneous Grassmann coefficients')
        return parities.pop() if parities else 0

    def split_parity(self):
        even = {m: a for m, a in self.comps.items() if popcount(m) % 2 == 0}
        odd = {m: a for m, a in self.comps.items() if popcount(m) % 2 == 1}
        return self.same_shape(even), self.same_shape(odd)

    def _check(self, other):
        if not isinstance(other, MixedForm):
            raise StructuralError('expected MixedForm, got {}'.format(type(other).__name__))
        if self.algebra != other.algebra:
            raise StructuralError('mismatched internal algebras {} and {}'.format(self.algebra, other.algebra))

    def __add__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        self._check(other)
        if (self.i, self.j) != (other.i, other.j):
            raise StructuralError('cannot add degrees ({}, {}) and ({}, {})'.format(
                self.i, self.j, other.i, other.j))
        out = dict(self.comps)
        for m, a in other.comps.items():
            _accumulate(out, m, a)
        ghost = self.ghost if self.ghost == other.ghost else None
        if not self.comps:
            ghost = other.ghost
        elif not other.comps:
            ghost = self.ghost
        return MixedForm(self.algebra, self.i, self.j, out, ghost=ghost,
                         bandwidth=_max_bandwidth(self.bandwidth, other.bandwidth))

    __radd__ = __add__

    def __neg__(self):
        return self.same_shape({m: -a for m, a in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        return self.same_shape({m: a * factor for m, a in self.comps.items()})

    def __mul__(self, other):
        if isinstance(other, MixedForm):
            return wedge(self, other)
        if isinstance(other, GrassmannScalar):
            return wedge(self, scalar_form(self.algebra, other))
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, GrassmannScalar):
            return wedge(scalar_form(self.algebra, other), self)
        return self.scale(other)

    def pointwise(self, field, bandwidth=None):
        """Multiply by a batch-shaped array (a function on the grid)."""
        field = np.asarray(field)[..., None, None, None, None]
        return MixedForm(self.algebra, self.i, self.j,
                         {m: a * field for m, a in self.comps.items()}, ghost=self.ghost,
                         bandwidth=_combine_bandwidth(self.bandwidth, bandwidth))

    def wedge(self, other):
        return wedge(self, other)

    def max_abs(self):
        return max((array_max_abs(a) for a in self.comps.values()), default=0.0)

    def strip(self, bits):
        out = {}
        for m, a in self.comps.items():
            if m & bits == bits:
                rest = m ^ bits
                out[rest] = a if merge_sign(bits, rest) == 1 else -a
        return self.same_shape(out)

    def select(self, predicate):
        return self.same_shape({m: a for m, a in self.comps.items() if predicate(m)})

    def shifted(self, mask_map):
        """Relabel masks through mask_map (used to merge generator pools)."""
        return self.same_shape({mask_map(m): a for m, a in self.comps.items()})

    def prune(self):
        if not self.exact:
            return self
        out = {m: a for m, a in self.comps.items() if array_max_abs(a) != 0}
        return self.same_shape(out)

    def coefficient(self, form_index, internal_index):
        """Scalar (0,0) form holding one coefficient slot of every monomial."""
        comps = {m: a[..., form_index:form_index + 1, internal_index:internal_index + 1, :, :]
                 for m, a in self.comps.items()}
        return MixedForm(self.algebra, 0, 0, comps, ghost=self.ghost, bandwidth=self.bandwidth)

    def extra_slice(self, rows=slice(None), cols=slice(None)):
        comps = {m: a[..., rows, cols] for m, a in self.comps.items()}
        return self.same_shape(comps)

    def map_arrays(self, function, bandwidth=None):
        return MixedForm(self.algebra, self.i, self.j,
                         {m: function(a) for m, a in self.comps.items()}, ghost=self.ghost,
                         bandwidth=self.bandwidth if bandwidth is None else bandwidth)

    def with_ghost(self, ghost):
        return self.same_shape(self.comps, ghost=ghost)

    def conjugate(self):
        return self.map_arrays(conjugate_array)

    def transpose_extra(self):
        return self.map_arrays(lambda a: np.swapaxes(a, -1, -2))


def scalar_form(algebra, value, ghost=0):
    """(0,0) form from a number or GrassmannScalar."""
    value = _as_grassmann(value)
    comps = {}
    for m, v in value.comps.items():
        numeric = isinstance(v, (int, float, complex, np.number))
        array = np.empty((1, 1, 1, 1), dtype=np.result_type(v) if numeric else object)
        array[0, 0, 0, 0] = v
        comps[m] = array
    return MixedForm(algebra, 0, 0, comps, ghost=ghost, bandwidth=0)


def _scatter(prod, axis, targets, signs, size, exact):
    """Sum prod along `axis` into `size` slots, moving the new axis to `axis`."""
    hot = _one_hot(len(targets), size, targets, signs, exact)
    out = np.tensordot(prod, hot, axes=([axis], [0]))
    return np.moveaxis(out, -1, axis)


def wedge(*forms):
    """Exterior product of any number of MixedForms (left to right)."""
    if not forms:
        raise StructuralError('wedge of nothing')
    result = forms[0]
    for form in forms[1:]:
        result = _wedge2(result, form)
    return result


def _wedge2(a, b):
    """Wedge of two MixedForms under the single Z2 grading.

    The total parity of a monomial theta^m dx^I v_J is |m| + |I| + |J| mod 2,
    so moving v_J past dx^K costs (-1)^(|J||K|) and theta^m past dx^I v_J
    costs (-1)^(|m|(|I| + |J|)).  In particular (1,1) forms commute:
    dx^1 v_1 ^ dx^2 v_2 = + dx^2 v_2 ^ dx^1 v_1.  Ghost numbers add, which is
    what makes every term of the BFV action carry ghost number +1.
    """
    a._check(b)
    alg = a.algebra
    i, j = a.i + b.i, a.j + b.j
    out = {}
    if alg.form_size(i) and alg.internal_size(j) and a.comps and b.comps:
        f1, f2, fdst, fsign = alg.form_table(a.i, b.i)
        v1, v2, vdst, vsign = alg.internal_table(a.j, b.j)
        exact = a.exact or b.exact
        base = -1 if (b.i * a.j) % 2 else 1
        for m1, A in a.comps.items():
            Ag = A[..., f1[:, None], v1[None, :], :, :]
            for m2, B in b.comps.items():
                s = merge_sign(m1, m2)
                if not s:
                    continue
                if (popcount(m2) * (a.i + a.j)) % 2:
                    s = -s
                s *= base
                Bg = B[..., f2[:, None], v2[None, :], :, :]
                prod = _extra_mul(Ag, Bg)
                nb = prod.ndim - 4
                C = _scatter(prod, nb, fdst, fsign, alg.form_size(i), exact)
                C = _scatter(C, nb + 1, vdst, vsign, alg.internal_size(j), exact)
                _accumulate(out, m1 | m2, C if s == 1 else -C)
    return MixedForm(alg, i, j, out, ghost=_sum_ghost(a.ghost, b.ghost),
                     bandwidth=_combine_bandwidth(a.bandwidth, b.bandwidth))


def power(form, k):
    """k-fold wedge of a form with itself (k = 0 gives the unit)."""
    if k == 0:
        return unit_form(form.algebra, exact=form.exact)
    return wedge(*([form] * k))


def unit_form(algebra, exact=False):
    array = np.ones((1, 1, 1, 1), dtype=object if exact else float)
    if exact:
        array[0, 0, 0, 0] = QQ(1)
    return MixedForm(algebra, 0, 0, {0: array})


def eta_pair(a, b):
    """Internal product (a, b) contracting all internal indices with eta."""
    a._check(b)
    if a.j != b.j or a.j not in (1, 2):
        raise UnsupportedPairingError('internal product needs degrees (1,1) or (2,2), got ({}, {})'.format(
            a.j, b.j))
    alg = a.algebra
    i = a.i + b.i
    out = {}
    if alg.form_size(i) and a.comps and b.comps:
        f1, f2, fdst, fsign = alg.form_table(a.i, b.i)
        g = alg.gram(a.j).reshape(-1, 1, 1)
        exact = a.exact or b.exact
        for m1, A in a.comps.items():
            Ag = A[..., f1, :, :, :] * g
            for m2, B in b.comps.items():
                s = merge_sign(m1, m2)
                if not s:
                    continue
                if (popcount(m2) * a.i) % 2:
                    s = -s
                Bg = B[..., f2, :, :, :]
                prod = _extra_mul(Ag, Bg).sum(axis=-3)
                nb = prod.ndim - 3
                C = _scatter(prod, nb, fdst, fsign, alg.form_size(i), exact)
                C = C[..., :, None, :, :]
                _accumulate(out, m1 | m2, C if s == 1 else -C)
    return MixedForm(alg, i, 0, out, ghost=_sum_ghost(a.ghost, b.ghost),
                     bandwidth=_combine_bandwidth(a.bandwidth, b.bandwidth))


def interior_coordinate(k, a):
    """Contraction of d/dx^k, an odd derivation with respect to total parity."""
    alg = a.algebra
    if a.i == 0:
        return MixedForm(alg, 0, a.j, {}, ghost=a.ghost, bandwidth=a.bandwidth)
    if a.i > alg.form_dim or not a.comps:
        # d of a top form lands above form_dim and is zero
        return MixedForm(alg, a.i - 1, a.j, {}, ghost=a.ghost, bandwidth=a.bandwidth)
    src, dst, sign = alg.interior_table(a.i, k)
    out = {}
    size = alg.form_size(a.i - 1)
    for m, A in a.comps.items():
        s = -1 if popcount(m) % 2 else 1
        moved = A[..., src, :, :, :] * (sign * s).reshape(-1, 1, 1, 1)
        C = np.zeros(A.shape[:-4] + (size,) + A.shape[-3:], dtype=A.dtype)
        C[..., dst, :, :, :] = moved
        out[m] = C
    return MixedForm(alg, a.i - 1, a.j, out, ghost=a.ghost, bandwidth=a.bandwidth)


class VectorField:
    """Tangent vector field xi = xi^k d/dx^k with (0,0)-form components.

    Components may carry Grassmann coefficients (odd vector fields) and a
    ghost number.
    """

    def __init__(self, components):
        self.components = list(components)
        if not self.components:
            raise StructuralError('empty vector field')
        self.algebra = self.components[0].algebra
        if len(self.components) != self.algebra.form_dim:
            raise StructuralError('vector field needs {} components'.format(self.algebra.form_dim))

    @property
    def ghost(self):
        return self.components[0].ghost

    @property
    def bandwidth(self):
        return _max_bandwidth(*[c.bandwidth for c in self.components])

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def scale(self, factor):
        return VectorField([c.scale(factor) for c in self.components])

    def strip(self, bits):
        return VectorField([c.strip(bits) for c in self.components])

    def max_abs(self):
        return max(c.max_abs() for c in self.components)


def iota_vector(xi, a):
    """Interior product iota_xi a = sum_k xi^k iota_k a."""
    result = None
    for k, component in enumerate(xi.components):
        term = wedge(component, interior_coordinate(k, a))
        result = term if result is None else result + term
    return result


def j_internal(X, a):
    """Internal contraction j_X a over the leading internal index.

    X must be a Grassmann-free (0,1) form; its matrix value multiplies the
    coefficient of a on the right.  j_X is an odd derivation: it passes the
    coefficient theta^m dx^I with sign (-1)^(|m| + i).
    """
    a._check(X)
    if X.i != 0 or X.j != 1 or set(X.comps) - {0}:
        raise StructuralError('j_internal needs an even (0,1) contraction vector')
    alg = a.algebra
    if a.j == 0:
        return MixedForm(alg, a.i, 0, {}, ghost=a.ghost, bandwidth=a.bandwidth)
    src, dst, vec, sign = alg.contraction_table(a.j)
    exact = a.exact or X.exact
    Xc = X.comps.get(0)
    out = {}
    if Xc is not None:
        Xg = Xc[..., 0:1, vec, :, :]
        for m, A in a.comps.items():
            s = -1 if (popcount(m) + a.i) % 2 else 1
            Ag = A[..., :, src, :, :]
            prod = _extra_mul(Ag, Xg) * sign.reshape(-1, 1, 1)
            nb = prod.ndim - 4
            C = _scatter(prod, nb + 1, dst, np.ones(len(dst), dtype=int), alg.internal_size(a.j - 1), exact)
            out[m] = C if s == 1 else -C
    return MixedForm(alg, a.i, a.j - 1, out, ghost=_sum_ghost(a.ghost, X.ghost),
                     bandwidth=_combine_bandwidth(a.bandwidth, X.bandwidth))


SPIN_MODES = (None, 'psi', 'psibar', 'gamma')


def lie_bracket(alpha, beta, spin=None, generators=None):
    """Graded action [alpha, beta] of an so(N-1,1)-valued form.

    The bivector v_a ^ v_b acts on V as u -> eta(v_b, u) v_a - eta(v_a, u) v_b
    and on Lambda^j V as a derivation.  With spin='psi' the spinor value of
    beta is acted on from the left by sum_k alpha^k S_k, with spin='psibar'
    from the right by its negative, and with spin='gamma' by the commutator
    (in addition to the action on internal indices).  `generators` holds the
    spin matrices S_k = -1/2 gamma_a gamma_b for k = (a, b), a < b.
    """
    alpha._check(beta)
    if alpha.j != 2:
        raise StructuralError('lie_bracket needs an internal degree 2 left argument, got {}'.format(alpha.j))
    if spin not in SPIN_MODES:
        raise StructuralError('unknown spin mode {}'.format(spin))
    if spin is not None and generators is None:
        raise StructuralError('spin action needs the spin generators')
    if alpha.extra != (1, 1):
        raise StructuralError('lie_bracket needs scalar-valued alpha')
    alg = alpha.algebra
    i = alpha.i + beta.i
    out = {}
    if alg.form_size(i) and alpha.comps and beta.comps:
        f1, f2, fdst, fsign = alg.form_table(alpha.i, beta.i)
        R = alg.action_matrices(beta.j)
        exact = alpha.exact or beta.exact
        for m1, A in alpha.comps.items():
            Ag = A[..., f1, :, :, :]
            if spin is not None:
                alpha_s = np.tensordot(Ag[..., 0, 0], generators, axes=([Ag.ndim - 3], [0]))
            for m2, B in beta.comps.items():
                s = merge_sign(m1, m2)
                if not s:
                    continue
                if (popcount(m2) * alpha.i) % 2:
                    s = -s
                Bg = B[..., f2, :, :, :]
                nb = Bg.ndim - 4
                term = None
                if beta.j > 0:
                    RB = np.tensordot(Bg, R, axes=([nb + 1], [2]))
                    RB = np.moveaxis(RB, (-2, -1), (nb + 1, nb + 2))
                    term = (Ag[..., :, :, None, :, :] * RB).sum(axis=-4)
                if spin in ('psi', 'gamma'):
                    left = np.matmul(alpha_s[..., :, None, :, :], Bg)
                    term = left if term is None else term + left
                if spin in ('psibar', 'gamma'):
                    right = -np.matmul(Bg, alpha_s[..., :, None, :, :])
                    term = right if term is None else term + right
                if term is None:
                    continue
                C = _scatter(term, term.ndim - 4, fdst, fsign, alg.form_size(i), exact)
                _accumulate(out, m1 | m2, C if s == 1 else -C)
    return MixedForm(alg, i, beta.j, out, ghost=_sum_ghost(alpha.ghost, beta.ghost),
                     bandwidth=_combine_bandwidth(alpha.bandwidth, beta.bandwidth))


def graded_commutator(a, b):
    """a^b - (-1)^{|a||b|} b^a for matrix-valued forms, split by parity."""
    result = None
    for pa in a.split_parity():
        if not pa.comps:
            continue
        for pb in b.split_parity():
            if not pb.comps:
                continue
            sign = -1 if (pa.parity() * pb.parity()) % 2 else 1
            term = wedge(pa, pb) - wedge(pb, pa).scale(sign)
            result = term if result is None else result + term
    if result is None:
        return wedge(a, b)
    return result


"""
Construction helpers
"""


def coframe_form(algebra, frame, bandwidth=0):
    """Coframe e = e_mu dx^mu from frame[..., mu, a] = e^a_mu.

    The internal vector is written first, e = e^a_mu v_a dx^mu, so the
    stored coefficient of dx^mu v_a is -e^a_mu.
    """
    frame = np.asarray(frame)
    return MixedForm.from_array(algebra, 1, 1, -frame, bandwidth=bandwidth)


def vector_form(algebra, vector, bandwidth=0):
    vector = np.asarray(vector)
    return MixedForm.from_array(algebra, 0, 1, vector[..., None, :], bandwidth=bandwidth)


def gamma_form(algebra, gammas):
    """gamma = gamma^a v_a from lower-index matrices gammas[a] = gamma_a."""
    gammas = np.asarray(gammas)
    raised = np.stack([gammas[a] * algebra.eta[a] for a in range(algebra.N)])
    return MixedForm.from_array(algebra, 0, 1, raised[None, :, :, :], extra=True)


def spin_generators(algebra, gammas):
    """S_k = -1/2 gamma_a gamma_b for the basis bivector k = (a, b)."""
    gammas = np.asarray(gammas)
    out = []
    for a, b in algebra.internal_basis[2]:
        product = np.matmul(gammas[a], gammas[b])
        if gammas.dtype == object:
            out.append(product * exact_complex(Rational(-1, 2)))
        else:
            out.append(-0.5 * product)
    return np.stack(out)


"""
Sampling of pointwise values
"""


class FormSampler:
    """Random pointwise forms with exact rational or float coefficients.

    Methods
    -------
    scalar(), array(shape)
        Random coefficients.
    homogeneous(i, j, parity, generators, extra)
        Form whose Grassmann monomials all have the requested parity.
    bulk_frame(), boundary_frame()
        Nondegenerate random coframes, resampled until nondegenerate.
    """

    def __init__(self, rng, exact=True, complex_values=False):
        self.rng = rng
        self.exact = exact
        self.complex_values = complex_values

    def scalar(self):
        if self.exact:
            p = int(self.rng.integers(-9, 10))
            q = int(self.rng.integers(1, 5))
            if self.complex_values:
                r = int(self.rng.integers(-9, 10))
                s = int(self.rng.integers(1, 5))
                return exact_complex(Rational(p, q), Rational(r, s))
            return QQ(p, q)
        if self.complex_values:
            return complex(self.rng.standard_normal(), self.rng.standard_normal())
        return float(self.rng.standard_normal())

    def array(self, shape):
        if self.exact:
            out = np.empty(shape, dtype=object)
            for index in np.ndindex(*shape):
                out[index] = self.scalar()
            return out
        values = self.rng.standard_normal(shape)
        if self.complex_values:
            values = values + 1j * self.rng.standard_normal(shape)
        return values

    def masks(self, parity, generators):
        generators = list(generators)
        if parity % 2:
            return [1 << g for g in generators]
        masks = [0]
        for g, h in itertools.combinations(generators, 2):
            masks.append((1 << g) | (1 << h))
        return masks

    def homogeneous(self, algebra, i, j, parity, generators, extra=(1, 1), ghost=0):
        shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
        comps = {m: self.array(shape) for m in self.masks(parity, generators)}
        return MixedForm(algebra, i, j, comps, ghost=ghost)

    def parity(self):
        return int(self.rng.integers(0, 2))

    def _frame_candidate(self, rows, N):
        frame = self.array((rows, N))
        identity = np.eye(rows, N, dtype=int)
        if self.exact:
            for index in np.ndindex(rows, N):
                frame[index] = frame[index] * QQ(1, 4) + QQ(int(identity[index]) * 2)
            return frame
        return 0.25 * frame + 2 * identity

    def bulk_frame(self, N=4, budget=100):
        for _ in range(budget):
            frame = self._frame_candidate(N, N)
            det = exact_determinant(frame) if self.exact else np.linalg.det(frame)
            if magnitude(det) > (0 if self.exact else 1e-6):
                return frame
        raise DegeneracyError('no nondegenerate bulk frame within budget')

    def boundary_frame(self, algebra, budget=100):
        eta = np.diag(algebra.eta)
        for _ in range(budget):
            frame = self._frame_candidate(algebra.form_dim, algebra.N)
            normal = self.array((algebra.N,))
            if self.exact:
                normal[algebra.N - 1] = normal[algebra.N - 1] + QQ(3)
                full = np.vstack([frame, normal[None, :]])
                metric = frame.dot(eta.astype(object)).dot(frame.T)
                ok = exact_determinant(full) != 0 and exact_determinant(metric) != 0
            else:
                normal[algebra.N - 1] += 3.0
                full = np.vstack([frame, normal[None, :]])
                metric = frame @ eta @ frame.T
                ok = abs(np.linalg.det(full)) > 1e-6 and abs(np.linalg.det(metric)) > 1e-6
            if ok:
                return frame, normal
        raise DegeneracyError('no nondegenerate boundary frame within budget')

    def as_number(self, value):
        if self.exact:
            return QQ_I(value, 0) if self.complex_values else QQ(value)
        return value


"""
Identity catalog
"""


def _q(sampler, p, q=1):
    if sampler.exact:
        return QQ_I(QQ(p, q), 0) if sampler.complex_values else QQ(p, q)
    return p / q


def _sign(parity):
    return -1 if parity % 2 else 1


def _identity_bulk_1(sampler):
    alg = InternalAlgebra(4, form_dim=4)
    e = coframe_form(alg, sampler.bulk_frame())
    pa, pb = sampler.parity(), sampler.parity()
    A = sampler.homogeneous(alg, 0, 1, pa, (0, 1))
    B = sampler.homogeneous(alg, 0, 1, pb, (2, 3))
    e3 = power(e, 3)
    lhs = wedge(power(e, 4), eta_pair(A, B)).scale(_q(sampler, 1, 4))
    rhs = wedge(e3, eta_pair(e, A), B).scale(_sign(pa + pb))
    return (lhs - rhs).max_abs()


def _identity_bulk_2(sampler):
    alg = InternalAlgebra(4, form_dim=4)
    e = coframe_form(alg, sampler.bulk_frame())
    C = sampler.homogeneous(alg, 0, 2, sampler.parity(), (0, 1))
    D = sampler.homogeneous(alg, 0, 2, sampler.parity(), (2, 3))
    e2 = power(e, 2)
    lhs = wedge(e2, eta_pair(e2, C), D).scale(_q(sampler, 1, 4))
    rhs = wedge(power(e, 4), eta_pair(C, D)).scale(_q(sampler, 1, 24))
    return (lhs - rhs).max_abs()


def _coordinate_components(sampler, frame, vector_form_value):
    """B^mu with B = B^mu e_mu, as a list of (0,0) forms."""
    inverse = exact_inverse(frame) if sampler.exact else np.linalg.inv(frame)
    alg = vector_form_value.algebra
    out = []
    for mu in range(alg.N):
        total = None
        for a in range(alg.N):
            term = vector_form_value.coefficient(0, a).scale(inverse[a, mu])
            total = term if total is None else total + term
        out.append(total)
    return out


def _identity_corollary_1(sampler):
    alg = InternalAlgebra(4, form_dim=4)
    frame = sampler.bulk_frame()
    e = coframe_form(alg, frame)
    p_alpha, pb = sampler.parity(), sampler.parity()
    alpha = sampler.homogeneous(alg, 1, 0, p_alpha, (0, 1))
    B = sampler.homogeneous(alg, 0, 1, pb, (2, 3))
    upper = _coordinate_components(sampler, frame, B)
    contraction = None
    for mu in range(4):
        term = wedge(alpha.coefficient(mu, 0), upper[mu])
        contraction = term if contraction is None else contraction + term
    lhs = wedge(power(e, 3), alpha, B)
    rhs = wedge(power(e, 4), contraction).scale(_q(sampler, 1, 4) * _sign(pb + 1))
    return (lhs - rhs).max_abs()


def _identity_corollary_2(sampler):
    alg = InternalAlgebra(4, form_dim=4)
    frame = sampler.bulk_frame()
    e = coframe_form(alg, frame)
    p_omega, pd = sampler.parity(), sampler.parity()
    # omega = omega_{mu nu} dx^mu dx^nu and D = D^{mu nu} e_mu e_nu, sums over all index pairs
    omega_low = sampler.homogeneous(alg, 2, 0, p_omega, (0, 1))
    d_upper = sampler.homogeneous(alg, 2, 0, pd, (2, 3))
    omega = omega_low.scale(_q(sampler, 2))
    pairs = alg.form_basis[2]
    d_internal = {}
    for m, values in d_upper.comps.items():
        array = np.zeros((1, alg.internal_size(2), 1, 1), dtype=values.dtype)
        for n, (mu, nu) in enumerate(pairs):
            for k, (a, b) in enumerate(alg.internal_basis[2]):
                weight = frame[mu, a] * frame[nu, b] - frame[mu, b] * frame[nu, a]
                array[0, k, 0, 0] = array[0, k, 0, 0] + values[n, 0, 0, 0] * weight * 2
        d_internal[m] = array
    D = MixedForm(alg, 0, 2, d_internal)
    contraction = None
    for n in range(len(pairs)):
        term = wedge(omega_low.coefficient(n, 0), d_upper.coefficient(n, 0)).scale(_q(sampler, 2))
        contraction = term if contraction is None else contraction + term
    lhs = wedge(power(e, 2), omega, D)
    rhs = wedge(power(e, 4), contraction).scale(_q(sampler, -1, 6))
    return (lhs - rhs).max_abs()


def _boundary_setup(sampler):
    alg = InternalAlgebra(4, form_dim=3)
    frame, normal = sampler.boundary_frame(alg)
    return alg, coframe_form(alg, frame), vector_form(alg, normal)


def _identity_boundary_star_1(sampler):
    alg, e, en = _boundary_setup(sampler)
    pa, pb = sampler.parity(), sampler.parity()
    A = sampler.homogeneous(alg, 0, 1, pa, (0, 1))
    B = sampler.homogeneous(alg, 0, 1, pb, (2, 3))
    e2, e3 = power(e, 2), power(e, 3)
    lhs = wedge(en, e3, eta_pair(A, B)).scale(_q(sampler, 1, 6))
    rhs = (wedge(en, e2, eta_pair(e, A), B).scale(_q(sampler, 1, 2)) +
           wedge(e3, eta_pair(en, A), B).scale(_q(sampler, 1, 6))).scale(_sign(pa + pb))
    return (lhs - rhs).max_abs()


def _identity_boundary_star_2(sampler):
    alg, e, en = _boundary_setup(sampler)
    C = sampler.homogeneous(alg, 0, 2, sampler.parity(), (0, 1))
    D = sampler.homogeneous(alg, 0, 2, sampler.parity(), (2, 3))
    e2, e3 = power(e, 2), power(e, 3)
    lhs = wedge(en, e3, eta_pair(C, D)).scale(_q(sampler, 1, 6))
    rhs = (wedge(en, e, eta_pair(e2, C), D).scale(_q(sampler, 1, 2)) +
           wedge(e2, eta_pair(wedge(en, e), C), D).scale(_q(sampler, 1, 2)))
    return (lhs - rhs).max_abs()


def _identity_triangle(sampler):
    from engine.clifford import build_gamma
    alg = InternalAlgebra(4, form_dim=3)
    rep = build_gamma(4, exact=sampler.exact)
    gamma = gamma_form(alg, rep.gammas)
    complex_sampler = FormSampler(sampler.rng, exact=sampler.exact, complex_values=True)
    pc = sampler.parity()
    c = complex_sampler.homogeneous(alg, 0, 2, pc, (0, 1, 2))
    jjc = j_internal(gamma, j_internal(gamma, c))
    lhs = wedge(jjc, gamma)
    four = QQ_I(4, 0) if sampler.exact else 4.0
    bracket_form = wedge(gamma, jjc).scale(_sign(pc)) + lie_bracket(c, gamma).scale(four)
    contraction_form = (wedge(gamma, jjc) - j_internal(gamma, c).scale(four)).scale(_sign(pc))
    return max((lhs - bracket_form).max_abs(), (lhs - contraction_form).max_abs())


IDENTITY_CATALOG = {
    'bulk-1': _identity_bulk_1,
    'bulk-2': _identity_bulk_2,
    'corollary-1': _identity_corollary_1,
    'corollary-2': _identity_corollary_2,
    'boundary-★-1': _identity_boundary_star_1,
    'boundary-★-2': _identity_boundary_star_2,
    '▼': _identity_triangle,
}


def verify_pointwise_identity(name, seed, exact=True):
    """Max component residual of LHS - RHS of a catalog identity.

    In exact mode the residual is exactly 0 when the identity holds and
    otherwise the magnitude of a nonzero witness component.
    """
    if name not in IDENTITY_CATALOG:
        raise StructuralError('unknown identity id {}'.format(name))
    rng = np.random.default_rng(seed)
    sampler = FormSampler(rng, exact=exact)
    residual = IDENTITY_CATALOG[name](sampler)
    logger.debug('identity %s seed %d residual %s', name, seed, residual)
    return residual
