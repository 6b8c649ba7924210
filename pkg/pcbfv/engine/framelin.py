#!/usr/bin/env python3

"""
Frame linear algebra

Pointwise linear algebra of the boundary coframe: the maps W_k = e^k ^ . ,
the internal products rho_n = (e^n, .), the maps A_e and phi_e, rank and
kernel reports for the boundary and bulk lemmas, the decompositions that fix
the representatives of omega, Pi and B, and the presymplectic kernel systems.

Every map is assembled as a matrix in the lexicographic bases by applying
the graded-algebra operation to a stack of basis elements, so the matrices
inherit the sign conventions of engine.galg.  All routines accept a leading
batch shape (grid points or a stack of sampled frames).

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

import numpy as np
from sympy import Matrix
from sympy.polys.domains import QQ

from engine.errors import DegeneracyError, NonUniquenessError, StructuralError
from engine.galg import (InternalAlgebra, MixedForm, coframe_form, eta_pair, lie_bracket, merge_sign,
                         popcount, power, vector_form, wedge, to_rational)

logger = logging.getLogger(__name__)


"""
Helpers
"""


def flatten(form, extra=None):
    """mask -> batch + (n,) vectors of the coefficient slots of a form."""
    alg = form.algebra
    extra = tuple(extra or form.extra)
    size = alg.form_size(form.i) * alg.internal_size(form.j) * extra[0] * extra[1]
    out = {}
    for m, a in form.comps.items():
        out[m] = a.reshape(a.shape[:-4] + (size,))
    return out


def unflatten(vectors, algebra, i, j, extra=(1, 1), ghost=0, bandwidth=None):
    shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
    comps = {m: v.reshape(v.shape[:-1] + shape) for m, v in vectors.items()}
    return MixedForm(algebra, i, j, comps, ghost=ghost, bandwidth=bandwidth)


def basis_stack(algebra, i, j, extra=(1, 1), batch_rank=0, exact=False, dtype=float):
    """A form whose leading batch axis enumerates the basis of Omega^(i,j) (x extra)."""
    shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
    size = int(np.prod(shape))
    if exact:
        identity = np.zeros((size, size), dtype=object)
        for k in range(size):
            identity[k, k] = QQ(1)
    else:
        identity = np.eye(size, dtype=dtype)
    array = identity.reshape((size,) + (1,) * batch_rank + shape)
    return MixedForm(algebra, i, j, {0: array})


def operator_matrix(func, algebra, i, j, extra=(1, 1), batch=(), exact=False, dtype=float,
                    out_degrees=None, out_extra=None):
    """Matrices of a linear map on Omega^(i,j), one per Grassmann monomial.

    Returns mask -> batch + (rows, cols).  The map is applied to Grassmann-free
    basis elements, so the monomials come from the operator itself.
    """
    stack = basis_stack(algebra, i, j, extra, len(batch), exact, dtype)
    cols = stack.comps[0].shape[0]
    image = func(stack)
    oi, oj = (image.i, image.j) if out_degrees is None else out_degrees
    oextra = tuple(out_extra or (image.extra if image.comps else extra))
    rows = algebra.form_size(oi) * algebra.internal_size(oj) * oextra[0] * oextra[1]
    out = {}
    for m, a in image.comps.items():
        full = np.broadcast_to(a, (cols,) + tuple(np.broadcast_shapes(a.shape[1:-4], tuple(batch))) +
                               a.shape[-4:])
        flat = full.reshape(full.shape[:-4] + (rows,))
        out[m] = np.moveaxis(flat, 0, -1)
    if 0 not in out:
        out[0] = np.zeros(tuple(batch) + (rows, cols), dtype=object if exact else dtype)
    return out


def numeric_rank(matrix, rtol=1e-8):
    """Rank by singular-value thresholding relative to the largest singular value."""
    matrix = np.asarray(matrix)
    if matrix.dtype == object:
        return exact_rank(matrix)
    if 0 in matrix.shape[-2:]:
        return np.zeros(matrix.shape[:-2], dtype=int)
    s = np.linalg.svd(matrix, compute_uv=False)
    scale = np.max(s, axis=-1, keepdims=True)
    return np.sum(s > rtol * np.where(scale > 0, scale, 1.0), axis=-1)


def exact_rank(matrix):
    """Rank of an object array of QQ entries (single matrix or a stack)."""
    matrix = np.asarray(matrix)
    if matrix.ndim > 2:
        out = np.zeros(matrix.shape[:-2], dtype=int)
        for index in np.ndindex(*matrix.shape[:-2]):
            out[index] = exact_rank(matrix[index])
        return out
    rows, cols = matrix.shape
    return Matrix(rows, cols, lambda r, c: to_rational(matrix[r, c])).rank()


def kernel_basis(matrix, rank):
    """Orthonormal kernel basis, batch + (cols, cols - rank), from the SVD."""
    matrix = np.asarray(matrix, dtype=complex if np.iscomplexobj(matrix) else float)
    _, _, vh = np.linalg.svd(matrix)
    basis = np.conj(np.swapaxes(vh[..., rank:, :], -1, -2))
    return basis if np.iscomplexobj(matrix) else basis.real


def cokernel_basis(matrix, rank):
    """Orthonormal basis of the orthogonal complement of the image."""
    matrix = np.asarray(matrix, dtype=complex if np.iscomplexobj(matrix) else float)
    u, _, _ = np.linalg.svd(matrix)
    basis = u[..., :, rank:]
    return basis if np.iscomplexobj(matrix) else basis.real


def _first_bad_point(mask):
    bad = np.argwhere(mask)
    return tuple(int(x) for x in bad[0]) if len(bad) else None


def graded_solve(operator, rhs, parity, rtol=1e-12, name='operator'):
    """Solve A x = b for an operator with even Grassmann monomials.

    operator: mask -> batch + (n, n) with A = sum theta^m A_m; parity is the
    total parity P of the map, so A(theta^w x) = (-1)^(|w| P) theta^w A x.
    rhs: mask -> batch + (n,).  Solved by increasing popcount on the closure
    of the right-hand side monomials under union with the operator monomials.
    """
    body = operator.get(0)
    if body is None:
        raise DegeneracyError('{} has no body'.format(name))
    s = np.linalg.svd(body, compute_uv=False)
    ratio = s[..., -1] / np.where(s[..., 0] > 0, s[..., 0], 1.0)
    if np.any(ratio < rtol):
        raise DegeneracyError('{} is singular'.format(name), point=_first_bad_point(ratio < rtol),
                              report={'map': name, 'min_ratio': float(np.min(ratio))})
    support = set(rhs)
    grown = True
    while grown:
        grown = False
        for w in list(support):
            for m in operator:
                if m and not (m & w) and (m | w) not in support:
                    support.add(m | w)
                    grown = True
    solution = {}
    for u in sorted(support, key=lambda x: (popcount(x), x)):
        b = rhs.get(u)
        b = np.zeros(body.shape[:-1], dtype=np.result_type(body, *rhs.values())) if b is None else b
        for w, x in solution.items():
            if w == u or (w & u) != w:
                continue
            m = u ^ w
            if m not in operator:
                continue
            sign = merge_sign(m, w) * (-1 if (popcount(w) * parity) % 2 else 1)
            b = b - sign * np.einsum('...ij,...j->...i', operator[m], x)
        x = np.linalg.solve(body, b[..., None])[..., 0]
        if (popcount(u) * parity) % 2:
            x = -x
        solution[u] = x
    return solution


class LinearMapReport:
    """Rank diagnostics of one pointwise linear map.

    Attributes
    ----------
    map_id : str
    domain_dim, codomain_dim : int
    rank, kernel_dim : int (minimum / maximum over the batch)
    expected_rank : int or None
    kernel_basis : ndarray or None
    passed : bool
    """

    def __init__(self, map_id, matrix, expected_rank=None, expected_kernel=None, rtol=1e-8,
                 keep_kernel=False):
        self.map_id = map_id
        self.codomain_dim, self.domain_dim = matrix.shape[-2:]
        ranks = np.atleast_1d(numeric_rank(matrix, rtol))
        self.rank = int(np.min(ranks))
        self.rank_max = int(np.max(ranks))
        self.kernel_dim = self.domain_dim - self.rank
        self.expected_rank = expected_rank
        self.expected_kernel = expected_kernel
        self.kernel_basis = kernel_basis(matrix, self.rank) if keep_kernel and matrix.dtype != object else None
        ok = self.rank == self.rank_max
        if expected_rank is not None:
            ok = ok and self.rank == expected_rank
        if expected_kernel is not None:
            ok = ok and self.kernel_dim == expected_kernel
        self.passed = bool(ok)

    def as_dict(self):
        return {
            'map': self.map_id,
            'domain_dim': self.domain_dim,
            'codomain_dim': self.codomain_dim,
            'rank': self.rank,
            'kernel_dim': self.kernel_dim,
            'expected_rank': self.expected_rank,
            'expected_kernel': self.expected_kernel,
            'passed': self.passed,
        }


"""
Coframe
"""


class Coframe:
    """Boundary coframe data (e, e_n) at one point or over a batch.

    Attributes
    ----------
    frame : ndarray
        batch + (3, N) with frame[..., mu, a] = e^a_mu.
    normal : ndarray
        batch + (N,), the completing internal vector e_n.
    algebra : InternalAlgebra
    threshold : float
        Lower bound on |det g_boundary|.

    Methods
    -------
    metric()
        Induced boundary metric e^T eta e.
    check()
        Raise DegeneracyError on a singular basis or degenerate metric.
    operator(name)
        Cached matrices of the named pointwise maps.
    """

    def __init__(self, frame, normal=None, threshold=1e-6, algebra=None, bandwidth=None):
        self.frame = np.asarray(frame)
        self.algebra = algebra or InternalAlgebra(self.frame.shape[-1], form_dim=self.frame.shape[-2])
        self.threshold = threshold
        self.bandwidth = bandwidth
        self.normal = default_normal(self.frame, self.algebra) if normal is None else np.asarray(normal)
        self._cache = {}

    @property
    def batch(self):
        return self.frame.shape[:-2]

    @property
    def exact(self):
        return self.frame.dtype == object

    def metric(self):
        eta = np.diag(self.algebra.eta)
        if self.exact:
            eta = eta.astype(object)
        return np.einsum('...ma,ab,...nb->...mn', self.frame, eta, self.frame)

    def full_matrix(self):
        return np.concatenate([self.frame, self.normal[..., None, :]], axis=-2)

    def check(self):
        if self.exact:
            return
        full = np.linalg.det(self.full_matrix().astype(float))
        metric = np.linalg.det(self.metric().astype(float))
        bad = np.abs(full) <= self.threshold
        if np.any(bad):
            raise DegeneracyError('e_1, e_2, e_3, e_n do not form a basis', point=_first_bad_point(bad))
        bad = np.abs(metric) <= self.threshold
        if np.any(bad):
            raise DegeneracyError('induced boundary metric is degenerate', point=_first_bad_point(bad),
                                  report={'min_abs_det_metric': float(np.min(np.abs(metric)))})

    def e(self):
        return coframe_form(self.algebra, self.frame, bandwidth=self.bandwidth)

    def en(self):
        return vector_form(self.algebra, self.normal, bandwidth=None if self.bandwidth is None else 0)

    def bulk(self):
        """The 4x4 bulk coframe (e_1, e_2, e_3, e_n) used for the bulk lemmas."""
        return self.full_matrix()

    def operator(self, name, i, j, func, extra=(1, 1)):
        key = (name, i, j, tuple(extra))
        if key not in self._cache:
            self._cache[key] = operator_matrix(func, self.algebra, i, j, extra=extra, batch=self.batch,
                                               exact=self.exact, dtype=self.frame.dtype)[0]
        return self._cache[key]

    def W(self, k, i, j):
        return assemble_W(k, i, j, self)

    def kernel(self, k, i, j, rtol=1e-8):
        key = ('kernel', k, i, j)
        if key not in self._cache:
            matrix = self.W(k, i, j)
            rank = int(np.max(numeric_rank(matrix, rtol)))
            self._cache[key] = kernel_basis(matrix, rank)
        return self._cache[key]


def default_normal(frame, algebra):
    """eta-unit vector eta-orthogonal to the span of e_1, e_2, e_3."""
    frame = np.asarray(frame, dtype=float)
    N = frame.shape[-1]
    cofactors = []
    for a in range(N):
        minor = np.delete(frame, a, axis=-1)
        cofactors.append((-1) ** a * np.linalg.det(minor))
    k = np.stack(cofactors, axis=-1)
    eta = np.asarray(algebra.eta, dtype=float)
    n = k * eta
    norm = np.einsum('...a,a,...a->...', n, eta, n)
    bad = np.abs(norm) < 1e-12
    if np.any(bad):
        raise DegeneracyError('no unit normal: the boundary is lightlike', point=_first_bad_point(bad))
    n = n / np.sqrt(np.abs(norm))[..., None]
    full = np.concatenate([frame, n[..., None, :]], axis=-2)
    orientation = np.sign(np.linalg.det(full))
    return n * np.where(orientation == 0, 1.0, orientation)[..., None]


def lightlike_frame():
    """A coframe whose induced boundary metric has rank 2, with a completing e_n."""
    frame = np.array([[1.0, 1.0, 0.0, 0.0],
                      [0.0, 0.0, 1.0, 0.0],
                      [0.0, 0.0, 0.0, 1.0]])
    normal = np.array([1.0, 0.0, 0.0, 0.0])
    return Coframe(frame, normal)


"""
The maps
"""


def assemble_W(k, i, j, coframe):
    """Matrix of W_k^(i,j) = e^k ^ . : Omega^(i,j) -> Omega^(i+k,j+k)."""
    alg = coframe.algebra
    if i < 0 or j < 0 or i + k > alg.form_dim or j + k > alg.N:
        raise StructuralError('W_{}^({},{}) is out of range'.format(k, i, j))
    e = coframe.e()
    ek = power(e, k)
    return coframe.operator('W{}'.format(k), i, j, lambda x: wedge(ek, x))


def assemble_rho(n, bulk_frame):
    """Matrix of rho_n = (e^n, .) : Omega^(0,n) -> Omega^(n,0) in the bulk."""
    bulk_frame = np.asarray(bulk_frame)
    N = bulk_frame.shape[-1]
    algebra = InternalAlgebra(N, form_dim=N)
    en = power(coframe_form(algebra, bulk_frame), n)
    return operator_matrix(lambda x: eta_pair(en, x), algebra, 0, n, batch=bulk_frame.shape[:-2],
                           exact=bulk_frame.dtype == object, dtype=bulk_frame.dtype)[0]


def assemble_bulk_W(k, i, j, bulk_frame):
    bulk_frame = np.asarray(bulk_frame)
    N = bulk_frame.shape[-1]
    algebra = InternalAlgebra(N, form_dim=N)
    ek = power(coframe_form(algebra, bulk_frame), k)
    return operator_matrix(lambda x: wedge(ek, x), algebra, i, j, batch=bulk_frame.shape[:-2],
                           exact=bulk_frame.dtype == object, dtype=bulk_frame.dtype)[0]


def verify_W_lemma(coframe, rtol=1e-8):
    """Rank reports for the boundary and bulk lemmas on W_k, rho_n and the Omega^(2,1) criterion."""
    reports = [
        LinearMapReport('W1(2,1) surjective', coframe.W(1, 2, 1), expected_rank=6, rtol=rtol),
        LinearMapReport('W1(1,1) injective', coframe.W(1, 1, 1), expected_rank=12, rtol=rtol),
        LinearMapReport('W1(1,2) surjective', coframe.W(1, 1, 2), expected_rank=12, expected_kernel=6, rtol=rtol),
    ]
    for k in (1, 2, 3):
        reports.append(LinearMapReport('W{}(0,0) injective'.format(k), coframe.W(k, 0, 0), expected_rank=1,
                                       rtol=rtol))
    kernel_12 = LinearMapReport('W1(1,2) kernel', coframe.W(1, 1, 2), expected_kernel=6, rtol=rtol)
    kernel_21 = LinearMapReport('W1(2,1) kernel', coframe.W(1, 2, 1), expected_kernel=6, rtol=rtol)
    reports.extend([kernel_12, kernel_21])
    equal = LinearMapReport('W1 kernel dims (1,2) = (2,1)', coframe.W(1, 1, 2), rtol=rtol)
    equal.passed = kernel_12.kernel_dim == kernel_21.kernel_dim
    reports.append(equal)
    reports.append(LinearMapReport('W2(1,0) injective', coframe.W(2, 1, 0), expected_rank=3, rtol=rtol))
    reports.append(LinearMapReport('W3(0,1) kernel', coframe.W(3, 0, 1), expected_kernel=3, rtol=rtol))
    reports.append(LinearMapReport('W2(0,2) kernel', coframe.W(2, 0, 2), expected_kernel=3, rtol=rtol))
    reports.append(LinearMapReport('Omega(2,1) criterion', omega21_criterion_matrix(coframe, rtol),
                                   expected_rank=12, rtol=rtol))
    bulk = coframe.bulk()
    reports.append(LinearMapReport('bulk W3(1,0) injective', assemble_bulk_W(3, 1, 0, bulk), expected_rank=4,
                                   rtol=rtol))
    reports.append(LinearMapReport('bulk W2(2,0) injective', assemble_bulk_W(2, 2, 0, bulk), expected_rank=6,
                                   rtol=rtol))
    reports.append(LinearMapReport('rho1 bijective', assemble_rho(1, bulk), expected_rank=4, rtol=rtol))
    reports.append(LinearMapReport('rho2 bijective', assemble_rho(2, bulk), expected_rank=6, rtol=rtol))
    try:
        a_e = KernelMap.A_e(coframe, rtol)
        reports.append(LinearMapReport('A_e bijective', a_e.matrix, expected_rank=3, rtol=rtol))
        phi_e = KernelMap.phi_e(coframe, rtol)
        reports.append(LinearMapReport('phi_e bijective', phi_e.matrix, expected_rank=3, rtol=rtol))
    except DegeneracyError as err:
        failed = LinearMapReport('A_e bijective', np.zeros((3, 3)), expected_rank=3, rtol=rtol)
        failed.passed = False
        reports.append(failed)
        logger.debug('kernel maps degenerate: %s', err)
    for report in reports:
        logger.debug('%s: rank %d kernel %d %s', report.map_id, report.rank, report.kernel_dim,
                     'ok' if report.passed else 'FAILED')
    return reports


def omega21_criterion_matrix(coframe, rtol=1e-8):
    """Joint map alpha -> (e alpha, e_n alpha mod Im W1(1,1)) on Omega^(2,1)."""
    image = coframe.W(1, 1, 1).astype(float)
    projector = np.conj(np.swapaxes(cokernel_basis(image, 12), -1, -2))
    first = coframe.W(1, 2, 1).astype(float)
    en = coframe.en()
    second = operator_matrix(lambda x: wedge(en, x), coframe.algebra, 2, 1, batch=coframe.batch)[0]
    return np.concatenate([first, projector @ second], axis=-2)


class KernelMap:
    """A pointwise map restricted to the kernel of a W map (A_e, phi_e).

    Attributes
    ----------
    name : str
    full : ndarray
        batch + (rows, n) matrix of the unrestricted map.
    kernel : ndarray
        batch + (n, k) orthonormal kernel basis.
    matrix : ndarray
        batch + (rows, k) restriction; square and invertible when the
        boundary metric is nondegenerate.
    parity : int
        Total parity of the map, for Grassmann right-hand sides.
    """

    def __init__(self, name, full, kernel, parity, rtol=1e-8):
        self.name = name
        self.full = full.astype(float) if full.dtype == object else full
        self.kernel = kernel
        self.matrix = self.full @ kernel
        self.parity = parity
        self.rtol = rtol
        s = np.linalg.svd(self.matrix, compute_uv=False)
        self.condition = s[..., 0] / np.where(s[..., -1] > 0, s[..., -1], np.finfo(float).tiny)
        bad = s[..., -1] <= rtol * s[..., 0]
        if np.any(bad):
            raise DegeneracyError('{} is not bijective'.format(name), point=_first_bad_point(bad),
                                  report={'map': name, 'singular_values': s.reshape(-1, s.shape[-1])[0].tolist()})

    @classmethod
    def A_e(cls, coframe, rtol=1e-8):
        e = coframe.e()
        full = coframe.operator('A_e', 0, 1, lambda x: eta_pair(e, x))
        return cls('A_e', full, coframe.kernel(3, 0, 1, rtol), parity=1, rtol=rtol)

    @classmethod
    def phi_e(cls, coframe, rtol=1e-8):
        e2 = power(coframe.e(), 2)
        full = coframe.operator('phi_e', 0, 2, lambda x: eta_pair(e2, x)) * 0.5
        return cls('phi_e', full, coframe.kernel(2, 0, 2, rtol), parity=0, rtol=rtol)

    def solve(self, rhs):
        """mask -> batch + (rows, cols) right-hand side -> kernel coefficients."""
        solution = {}
        for w, b in rhs.items():
            x = np.linalg.solve(self.matrix, b)
            solution[w] = -x if (popcount(w) * self.parity) % 2 else x
        return solution

    def apply(self, coefficients):
        out = {}
        for w, c in coefficients.items():
            y = self.matrix @ c
            out[w] = -y if (popcount(w) * self.parity) % 2 else y
        return out


def _columns(form):
    """mask -> batch + (n, r*s): coefficient slots as rows, matrix values as columns."""
    alg = form.algebra
    n = alg.form_size(form.i) * alg.internal_size(form.j)
    out = {}
    for m, a in form.comps.items():
        r, s = a.shape[-2:]
        out[m] = a.reshape(a.shape[:-4] + (n, r * s))
    return out


def _from_columns(columns, algebra, i, j, extra, ghost=0, bandwidth=None):
    shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
    comps = {m: c.reshape(c.shape[:-2] + shape) for m, c in columns.items()}
    return MixedForm(algebra, i, j, comps, ghost=ghost, bandwidth=bandwidth)


def map_A_e(coframe, p):
    """A_e(p) = (e, p) for p in Ker W3(0,1)."""
    return eta_pair(coframe.e(), p)


def map_phi_e(coframe, b):
    """phi_e(b) = 1/2 (e^2, b) for b in Ker W2(0,2)."""
    return eta_pair(power(coframe.e(), 2), b).scale(0.5)


def invert_kernel_map(kmap, target, algebra, j):
    """Kernel element x with kmap(x) = target (target of form degree matching kmap)."""
    columns = _columns(target)
    coefficients = kmap.solve(columns)
    vectors = {m: np.einsum('...nk,...kc->...nc', kmap.kernel, c) for m, c in coefficients.items()}
    return _from_columns(vectors, algebra, 0, j, target.extra, ghost=target.ghost, bandwidth=None)


"""
Decompositions
"""


def decompose_omega(coframe, T, rtol=1e-8):
    """Unique T = e sigma + e_n [v, e] with sigma in Omega^(1,1), v in Ker W1(1,2).

    Returns (sigma, v).  The connection representative is omega_tilde - v.
    """
    alg = coframe.algebra
    if (T.i, T.j) != (2, 2):
        raise StructuralError('decompose_omega needs an Omega^(2,2) source')
    e, en = coframe.e(), coframe.en()
    w11 = coframe.W(1, 1, 1).astype(float) if coframe.exact else coframe.W(1, 1, 1)
    kernel = coframe.kernel(1, 1, 2, rtol)
    shift = operator_matrix(lambda x: wedge(en, lie_bracket(x, e)), alg, 1, 2, batch=coframe.batch)[0]
    block = np.concatenate([w11, shift @ kernel], axis=-1)
    s = np.linalg.svd(block, compute_uv=False)
    bad = s[..., -1] <= rtol * s[..., 0]
    if np.any(bad):
        point = _first_bad_point(bad)
        _, local, vh = np.linalg.svd(block[point])
        rank = int(np.sum(local > rtol * local[0]))
        raise NonUniquenessError('omega decomposition is not unique', point=point,
                                 report={'map': 'omega-decomposition', 'rank': rank,
                                         'expected_rank': block.shape[-1]},
                                 witness=np.conj(vh[-1]))
    logger.debug('omega decomposition: max condition %.3e', float(np.max(s[..., 0] / s[..., -1])))
    columns = _columns(T)
    split = w11.shape[-1]
    sigma, v = {}, {}
    for w, b in columns.items():
        x = np.linalg.solve(block, b)
        # the sigma block has even parity, the v block odd
        sigma[w] = x[..., :split, :]
        v[w] = -x[..., split:, :] if popcount(w) % 2 else x[..., split:, :]
    v_full = {w: kernel @ c for w, c in v.items()}
    extra = T.extra
    return (_from_columns(sigma, alg, 1, 1, extra, ghost=T.ghost), _from_columns(v_full, alg, 1, 2, extra, ghost=T.ghost))


def decompose_Pi(coframe, Pi_tilde, dphi, rtol=1e-8):
    """Unique Pi_tilde = Pi + p with p in Ker W3(0,1) and (e, Pi) = -d phi."""
    kmap = KernelMap.A_e(coframe, rtol)
    K = eta_pair(coframe.e(), Pi_tilde) + dphi
    p = invert_kernel_map(kmap, K, coframe.algebra, 1)
    return Pi_tilde - p, p


def decompose_B(coframe, B_tilde, F_A, rtol=1e-8):
    """Unique B_tilde = B + b with b in Ker W2(0,2) and F_A + 1/2 (e^2, B) = 0."""
    kmap = KernelMap.phi_e(coframe, rtol)
    K = map_phi_e(coframe, B_tilde) + F_A
    b = invert_kernel_map(kmap, K, coframe.algebra, 2)
    return B_tilde - b, b


"""
Pointwise solves on Grassmann-valued coframes
"""


def stacked_solve(blocks, targets, algebra, i, j, extra=(1, 1), batch=(), dtype=float, parity=0,
                  name='stacked system'):
    """Solve the square system block_k(x) = target_k for x in Omega^(i,j).

    blocks are linear maps built from possibly Grassmann-valued forms, so
    each contributes one matrix per monomial; parity is the common total
    parity of the maps.
    """
    matrices = [operator_matrix(f, algebra, i, j, extra=extra, batch=batch, dtype=dtype, out_extra=extra)
                for f in blocks]
    rows = [m[0].shape[-2] for m in matrices]
    masks = set()
    for m in matrices:
        masks.update(m)
    operator = {}
    for mask in masks:
        parts = []
        for m, r in zip(matrices, rows):
            part = m.get(mask)
            if part is None:
                part = np.zeros(m[0].shape[:-2] + (r, m[0].shape[-1]))
            parts.append(part)
        shape = np.broadcast_shapes(*[p.shape[:-2] for p in parts])
        operator[mask] = np.concatenate([np.broadcast_to(p, shape + p.shape[-2:]) for p in parts], axis=-2)
    rhs = {}
    target_vectors = [flatten(t) for t in targets]
    for mask in set().union(*target_vectors):
        parts = []
        for vectors, r in zip(target_vectors, rows):
            part = vectors.get(mask)
            parts.append(np.zeros(r) if part is None else part)
        shape = np.broadcast_shapes(*[p.shape[:-1] for p in parts])
        rhs[mask] = np.concatenate([np.broadcast_to(p, shape + p.shape[-1:]) for p in parts], axis=-1)
    solution = graded_solve(operator, rhs, parity, name=name)
    return unflatten(solution, algebra, i, j, extra=extra, bandwidth=None)


def lift(coframe, k, i, j, target, rtol=1e-8):
    """Minimum-norm x with e^k x = target; returns (x, residual).

    The minimum-norm solution has no component along Ker W_k^(i,j).
    """
    matrix = coframe.W(k, i, j)
    if coframe.exact:
        matrix = matrix.astype(float)
    inverse = np.linalg.pinv(matrix, rcond=rtol)
    columns = _columns(target)
    solution = {m: inverse @ b for m, b in columns.items()}
    residual = max((float(np.max(np.abs(matrix @ solution[m] - b))) for m, b in columns.items()), default=0.0)
    extra = target.extra
    x = _from_columns(solution, coframe.algebra, i, j, extra, ghost=target.ghost)
    return x, residual


"""
Presymplectic kernels
"""


class BlockSystem:
    """Pointwise block linear system on several unknown fields.

    Unknowns and equations are (name, i, j, extra) slots; entries are linear
    functions from an unknown slot to an equation slot.
    """

    def __init__(self, algebra, batch=(), dtype=float):
        self.algebra = algebra
        self.batch = tuple(batch)
        self.dtype = dtype
        self.unknowns = []
        self.equations = []
        self.entries = {}

    def _size(self, slot):
        _, i, j, extra = slot
        return self.algebra.form_size(i) * self.algebra.internal_size(j) * extra[0] * extra[1]

    def unknown(self, name, i, j, extra=(1, 1)):
        self.unknowns.append((name, i, j, tuple(extra)))

    def equation(self, name, i, j, extra=(1, 1)):
        self.equations.append((name, i, j, tuple(extra)))

    def entry(self, equation, unknown, func):
        self.entries[(equation, unknown)] = func

    def matrix(self):
        rows = []
        for eq in self.equations:
            row = []
            for un in self.unknowns:
                func = self.entries.get((eq[0], un[0]))
                if func is None:
                    block = np.zeros(self.batch + (self._size(eq), self._size(un)), dtype=self.dtype)
                else:
                    block = operator_matrix(func, self.algebra, un[1], un[2], extra=un[3], batch=self.batch,
                                            dtype=self.dtype, out_degrees=(eq[1], eq[2]),
                                            out_extra=eq[3])[0].astype(self.dtype)
                    block = np.broadcast_to(block, self.batch + block.shape[-2:])
                row.append(block)
            rows.append(np.concatenate(row, axis=-1))
        return np.concatenate(rows, axis=-2)

    def offsets(self):
        out = {}
        start = 0
        for un in self.unknowns:
            out[un[0]] = (start, start + self._size(un))
            start += self._size(un)
        return out


def presymplectic_kernel(theory, coframe, matter=None, rtol=1e-8):
    """Kernel of the boundary presymplectic two-form at one point.

    matter holds pointwise Grassmann-free MixedForms: 'Pi' (scalar), 'B'
    (Yang-Mills, with 'lie' the LieAlgebra), 'psi' and 'psibar' (spinor,
    complex values at body level).  Returns (report, shape_residuals).
    """
    matter = matter or {}
    alg = coframe.algebra
    e = coframe.e()
    e2, e3 = power(e, 2), power(e, 3)
    dtype = complex if theory == 'spinor' else float
    system = BlockSystem(alg, coframe.batch, dtype)
    system.unknown('X_e', 1, 1)
    system.unknown('X_omega', 1, 2)
    system.equation('e X_e', 2, 2)
    system.equation('e X_omega', 2, 3)
    system.entry('e X_e', 'X_e', lambda x: wedge(e, x))
    system.entry('e X_omega', 'X_omega', lambda x: wedge(e, x))
    zero_blocks = ['X_e']
    if theory == 'scalar':
        Pi = matter['Pi']
        system.unknown('X_phi', 0, 0)
        system.unknown('X_Pi', 0, 1)
        system.equation('Pi eq', 3, 4)
        system.equation('phi eq', 3, 3)
        system.entry('e X_omega', 'X_phi', lambda x: wedge(e2, Pi, x).scale(0.5))
        system.entry('Pi eq', 'X_e', lambda x: wedge(e2, Pi, x).scale(0.5))
        system.entry('Pi eq', 'X_Pi', lambda x: wedge(e3, x).scale(1.0 / 6.0))
        system.entry('phi eq', 'X_phi', lambda x: wedge(e3, x))
        zero_blocks.append('X_phi')
    elif theory == 'ym':
        B, lie = matter['B'], matter['lie']
        d = lie.dim
        system.unknown('X_A', 1, 0, (d, 1))
        system.unknown('X_B', 0, 2, (d, 1))
        system.equation('A eq', 2, 4, (d, 1))
        system.equation('B eq', 3, 2, (d, 1))
        system.entry('e X_omega', 'X_A', lambda x: lie.trace(wedge(e, B), x))
        system.entry('A eq', 'X_e', lambda x: wedge(e, B, x))
        system.entry('A eq', 'X_B', lambda x: wedge(e2, x).scale(0.5))
        system.entry('B eq', 'X_A', lambda x: wedge(e2, x))
        zero_blocks.append('X_A')
    elif theory == 'spinor':
        psi, psibar, gamma = matter['psi'], matter['psibar'], matter['gamma']
        system.unknown('X_psi', 0, 0, (4, 1))
        system.unknown('X_psibar', 0, 0, (1, 4))
        system.equation('psi eq', 3, 4, (4, 1))
        system.equation('psibar eq', 3, 4, (1, 4))
        quarter_i = 0.25j
        system.entry('e X_omega', 'X_psi', lambda x: wedge(e2, psibar, gamma, x).scale(quarter_i))
        system.entry('e X_omega', 'X_psibar', lambda x: wedge(e2, x, gamma, psi).scale(-quarter_i))
        system.entry('psi eq', 'X_e', lambda x: wedge(e2, gamma, psi, x).scale(-0.25))
        system.entry('psi eq', 'X_psi', lambda x: wedge(e3, gamma, x).scale(1.0 / 6.0))
        system.entry('psibar eq', 'X_e', lambda x: wedge(e2, psibar, gamma, x).scale(0.25))
        system.entry('psibar eq', 'X_psibar', lambda x: wedge(e3, x, gamma).scale(1.0 / 6.0))
        zero_blocks.extend(['X_psi', 'X_psibar'])
    elif theory != 'pc':
        raise StructuralError('unknown theory {}'.format(theory))
    matrix = system.matrix()
    expected = {'pc': 6, 'scalar': 9, 'ym': 6 + 3 * (matter['lie'].dim if theory == 'ym' else 0), 'spinor': 6}
    report = LinearMapReport('presymplectic kernel {}'.format(theory), matrix,
                             expected_kernel=expected[theory], rtol=rtol, keep_kernel=True)
    residuals = {}
    if report.kernel_basis is not None and report.kernel_dim:
        offsets = system.offsets()
        for name in zero_blocks:
            lo, hi = offsets[name]
            residuals[name] = float(np.max(np.abs(report.kernel_basis[..., lo:hi, :]))) if hi > lo else 0.0
    logger.debug('presymplectic kernel %s: dim %d, shape residuals %s', theory, report.kernel_dim, residuals)
    return report, residuals
