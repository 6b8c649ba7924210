#!/usr/bin/env python3

"""
BFV

Ghost and antifield sector of the boundary theories, the BFV action, its
cohomological vector field Q and the classical master equation
{S, S} = iota_Q iota_Q varpi.

The action is S = S_0 + S_1 where S_0 is the sum of the constraints with
the ghosts as parameters and S_1 = int R^phi phi^dagger is linear in the
antifields.  Every term carries ghost number +1: the ghosts are the odd
parameters of the constraints and the antifields of degree -1 pair with
products of two ghosts.

The ghost block of the BFV symplectic form is Darboux, so the ghost
components of Q are the R^phi.  The geometric components are the
Hamiltonian vector fields of the constraints plus the part coming from
S_1, which depends on e, omega and A without derivatives and is solved
pointwise.  The pairing of the ghost and antifield blocks of Q is the
derivative of S along the flow of the ghosts.

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

from engine.constant import DEFAULTS, GRADE_EXACT, GRADE_SPECTRAL
from engine.constraints import (HVF_KAPPA, GaugeParams, GeneratorPool, SPECIES, compare_fixed,
                                constraint_density, frame_components, hamiltonian_vf, pairing_density, perturbed,
                                project_direction, sample_params, sample_direction, spinor_lift, structural_sigma,
                                tangent_components)
from engine.errors import GhostNumberError, StructuralError
from engine.fields import (CovariantDerivative, integrate, partial, random_section, sample_config, TorusGrid,
                           vector_bracket)
from engine.framelin import operator_matrix, unflatten
from engine.galg import (MixedForm, VectorField, interior_coordinate, iota_vector, lie_bracket, merge_sign, popcount,
                         power, vector_form, wedge)

logger = logging.getLogger(__name__)

GHOSTS = ('c', 'xi', 'lam', 'mu')

# (form degree, internal degree) of the antifield paired with each ghost
ANTIFIELD_DEGREES = {'c': (3, 2), 'xi': (3, 4), 'lam': (3, 4), 'mu': (3, 4)}

ACTION_GHOST_NUMBER = 1

# varpi(Q, Q) over the fields = CME_KAPPA times the ghost flow of S when {S, S} = 0
CME_KAPPA = -2.0


def ghost_names(theory):
    return GHOSTS if theory == 'ym' else GHOSTS[:3]


def constraint_kinds(theory):
    return ('L', 'P', 'H', 'M') if theory == 'ym' else ('L', 'P', 'H')


"""
BFV phase space
"""


class BFVPoint:
    """Boundary fields together with ghosts and antifields.

    Attributes
    ----------
    point : PhaseSpacePoint
    ghosts : GaugeParams
        Ghosts c, xi, lambda (and mu), ghost number +1.
    antifields : dict
        ghost name -> antifield of ghost number -1.  The xi antifield is a
        list of top forms, one per component of xi.
    generators : dict
        Grassmann generators owned by the ghosts and antifields.
    """

    def __init__(self, point, ghosts, antifields, generators=None):
        self.point = point
        self.ghosts = ghosts
        self.antifields = dict(antifields)
        self.generators = dict(generators or {})

    def __repr__(self):
        return 'BFVPoint({}, ghosts={}, antifields={})'.format(self.theory, self.ghosts, sorted(self.antifields))

    @property
    def theory(self):
        return self.point.theory

    @property
    def generator_count(self):
        used = [g for gens in self.generators.values() for g in gens]
        return max([self.point.generator_count] + [g + 1 for g in used])

    def antifield_mask(self):
        mask = 0
        for name, gens in self.generators.items():
            if name.endswith('_dagger'):
                for g in gens:
                    mask |= 1 << g
        return mask

    def with_point(self, point):
        return BFVPoint(point, self.ghosts, self.antifields, self.generators)

    def with_ghosts(self, ghosts):
        return BFVPoint(self.point, ghosts, self.antifields, self.generators)

    def without_antifields(self):
        return BFVPoint(self.point, self.ghosts, zero_antifields(self.point), self.generators)


def _zero_ghost(point, name):
    alg = point.algebra
    if name == 'c':
        return MixedForm(alg, 0, 2, {}, ghost=1)
    if name == 'xi':
        return VectorField([MixedForm(alg, 0, 0, {}, ghost=1) for _ in range(alg.form_dim)])
    return MixedForm(alg, 0, 0, {}, ghost=1)


def zero_antifields(point):
    alg = point.algebra
    out = {}
    for name in ghost_names(point.theory):
        i, j = ANTIFIELD_DEGREES[name]
        if name == 'xi':
            out[name] = [MixedForm(alg, i, j, {}, ghost=-1) for _ in range(alg.form_dim)]
        else:
            out[name] = MixedForm(alg, i, j, {}, ghost=-1)
    return out


def sample_bfv_point(theory, seed, K=None, grid=None, budget=None, ghosts=None, antifields=True, point=None,
                     amplitude=0.5, **sampling):
    """Random BFV point: a sampled configuration, ghosts and antifields.

    Ghosts own `budget` generators each, antifields one each.  Ghosts not
    named in `ghosts` and, with antifields=False, all antifields are zero.
    """
    if point is None:
        grid = grid if isinstance(grid, TorusGrid) else TorusGrid(DEFAULTS['grid'] if grid is None else grid)
        point = sample_config(theory, seed, K=K, grid=grid, **sampling)
    names = ghost_names(point.theory)
    active = names if ghosts is None else tuple(n for n in names if n in ghosts)
    rng = np.random.default_rng([seed, 2])
    pool = GeneratorPool(point.generator_count)
    params = sample_params(point, rng, active, pool, budget=budget, amplitude=amplitude)
    values = {n: getattr(params, n) if n in active else _zero_ghost(point, n) for n in GHOSTS}
    ghost_params = GaugeParams(generators=params.generators, **values)
    generators = dict(params.generators)
    fields = zero_antifields(point)
    alg, K = point.algebra, point.K
    for name in names:
        gens = pool.take(1)
        generators[name + '_dagger'] = gens
        if not antifields:
            continue
        masks = [1 << gens[0]]
        i, j = ANTIFIELD_DEGREES[name]
        if name == 'xi':
            fields[name] = [random_section(rng, alg, i, j, K, point.grid, masks=masks, amplitude=amplitude,
                                           ghost=-1) for _ in range(alg.form_dim)]
        elif name == 'mu':
            fields[name] = random_section(rng, alg, i, j, K, point.grid, extra=(point.lie.dim, 1), masks=masks,
                                          amplitude=amplitude, ghost=-1)
        else:
            fields[name] = random_section(rng, alg, i, j, K, point.grid, masks=masks, amplitude=amplitude,
                                          ghost=-1)
    bfv_point = BFVPoint(point, ghost_params, fields, generators)
    logger.debug('sampled %r with %d generators', bfv_point, bfv_point.generator_count)
    return bfv_point


"""
Action
"""


def _check_ghost(term, label):
    if term.comps and term.ghost != ACTION_GHOST_NUMBER:
        raise GhostNumberError('action term {} has ghost number {} instead of {}'.format(
            label, term.ghost, ACTION_GHOST_NUMBER))
    return term


def _total(terms):
    total = None
    for term in terms:
        total = term if total is None else total + term
    return total


def _check_theory(theory, bp):
    if theory != bp.theory:
        raise StructuralError('BFV point belongs to theory {}, not {}'.format(bp.theory, theory))


def ghost_velocities(bp):
    """Ghost components of Q, R^phi = dS/dphi^dagger.

    With X = [c, lambda e_n] and Y = L^omega0_xi(lambda e_n) split along
    the frame as Z = Z^(a) e_a + Z^(n) e_n:

      R^c   = 1/2 [c,c] - L_xi c + 1/2 iota_xi iota_xi F_omega0 - (X - Y)^(a) (omega - omega0)_a
      R^xi  = (X - Y)^(a) - 1/2 [xi, xi]^a
      R^lam = X^(n) - Y^(n)
      R^mu  = 1/2 [mu,mu] - L^A0_xi mu + 1/2 iota_xi iota_xi F_A0 + (Y - X)^(a) (A - A0)_a
    """
    point, g = bp.point, bp.ghosts
    cov0 = point.reference_covariant()
    lam_en = wedge(g.lam, point.en())
    Xa, Xn = frame_components(lie_bracket(g.c, lam_en), point)
    Ya, Yn = frame_components(cov0.lie_derivative(g.xi, lam_en), point)
    flow = [x - y for x, y in zip(Xa, Ya)]
    difference = point.field('omega') - point.reference()
    R_c = (lie_bracket(g.c, g.c).scale(0.5) - cov0.lie_derivative(g.xi, g.c) +
           iota_vector(g.xi, iota_vector(g.xi, cov0.curvature())).scale(0.5))
    R_c = R_c - _total(wedge(f, interior_coordinate(a, difference)) for a, f in enumerate(flow))
    bracket = vector_bracket(g.xi, g.xi, point.grid)
    out = {
        'c': R_c,
        'xi': VectorField([f - b.scale(0.5) for f, b in zip(flow, bracket.components)]),
        'lam': Xn - Yn,
    }
    if point.theory == 'ym':
        lie = point.lie
        A0 = point.reference_A()
        gauge0 = CovariantDerivative(point.grid, A=A0, lie=lie)
        gauge = point.field('A') - A0
        R_mu = (lie.bracket(g.mu, g.mu).scale(0.5) - gauge0.lie_derivative(g.xi, g.mu, 'lie') +
                iota_vector(g.xi, iota_vector(g.xi, gauge0.gauge_curvature())).scale(0.5))
        out['mu'] = R_mu - _total(wedge(f, interior_coordinate(a, gauge)) for a, f in enumerate(flow))
    return out


def constraint_part_density(bp):
    """Integrand of S_0, the constraints with the ghosts as parameters."""
    return _total(_check_ghost(constraint_density(kind, bp.point, bp.ghosts), kind)
                  for kind in constraint_kinds(bp.theory))


def antifield_density(bp, velocities=None):
    """Integrand of S_1 = int R^phi phi^dagger."""
    R = ghost_velocities(bp) if velocities is None else velocities
    fields = bp.antifields
    terms = [
        _check_ghost(wedge(R['c'], fields['c']), 'c^dagger'),
        _check_ghost(_total(wedge(r, f) for r, f in zip(R['xi'].components, fields['xi'])), 'xi^dagger'),
        _check_ghost(wedge(R['lam'], fields['lam']), 'lambda^dagger'),
    ]
    if bp.theory == 'ym':
        terms.append(_check_ghost(bp.point.lie.trace(R['mu'], fields['mu']), 'mu^dagger'))
    return _total(terms)


def bfv_density(bp):
    return constraint_part_density(bp) + antifield_density(bp)


def eval_bfv_action(theory, bp):
    """The BFV action S as a GrassmannScalar."""
    _check_theory(theory, bp)
    return integrate(bfv_density(bp), bp.point.grid)


"""
Cohomological vector field
"""


class BFVVectorField:
    """Components of the Hamiltonian vector field Q of the BFV action.

    geometric holds the field components in the convention of
    HamiltonianVF (omega carried as e ^ Q_omega under 'e_omega'); ghosts
    holds the ghost components R^phi.
    """

    def __init__(self, theory, geometric, ghosts):
        self.theory = theory
        self.geometric = dict(geometric)
        self.ghosts = dict(ghosts)

    def __repr__(self):
        return 'BFVVectorField({}, {}, {})'.format(self.theory, sorted(self.geometric), sorted(self.ghosts))

    def __getitem__(self, name):
        if name in self.geometric:
            return self.geometric[name]
        return self.ghosts[name]

    def max_abs(self):
        values = list(self.geometric.values())
        for name, value in self.ghosts.items():
            values.extend(value.components if name == 'xi' else [value])
        return max((v.max_abs() for v in values), default=0.0)


def _sum_components(parts):
    out = {}
    for part in parts:
        for name, value in part.items():
            if value is None or not value.comps:
                continue
            out[name] = value if name not in out else out[name] + value
    return out


def _basis(algebra, i, j, extra=(1, 1)):
    shape = (algebra.form_size(i), algebra.internal_size(j)) + tuple(extra)
    size = int(np.prod(shape))
    for k in range(size):
        array = np.zeros(size)
        array[k] = 1.0
        yield MixedForm(algebra, i, j, {0: array.reshape(shape)}, bandwidth=0)


def _variation(bp, name, basis, bits):
    """Pointwise targets HVF_KAPPA delta S_1 along the constant basis elements of one field."""
    point = bp.point
    columns = {}
    for k, b in enumerate(basis):
        moved = bp.with_point(perturbed(point, {name: b}, bits))
        density = antifield_density(moved).strip(bits)
        for m, a in density.comps.items():
            if m not in columns:
                columns[m] = np.zeros(point.grid.shape + (len(basis),), dtype=complex)
            columns[m][..., k] = HVF_KAPPA * np.broadcast_to(a[..., 0, 0, 0, 0], point.grid.shape)
    return columns


def _dual_solve(point, pairing, basis, columns, i, j, extra=(1, 1), ghost=None):
    """x in Omega^(i,j) with pairing(x, b_k) = s_k for every basis element, least squares per point."""
    alg = point.algebra
    rows = [operator_matrix(lambda x, b=b: pairing(x, b), alg, i, j, extra=extra, batch=point.grid.shape,
                            dtype=complex)[0] for b in basis]
    shape = np.broadcast_shapes(*[r.shape[:-2] for r in rows])
    matrix = np.concatenate([np.broadcast_to(r, shape + r.shape[-2:]) for r in rows], axis=-2)
    inverse = np.linalg.pinv(matrix)
    solution = {m: np.einsum('...ck,...k->...c', inverse, s) for m, s in columns.items()}
    return unflatten(solution, alg, i, j, extra=extra, ghost=ghost, bandwidth=None)


def antifield_geometric_components(bp, bits=None):
    """Geometric components of the Hamiltonian vector field of S_1.

    S_1 depends on e, omega and A without derivatives, so varpi(Q, Y) =
    HVF_KAPPA delta_Y S_1 is solved point by point against constant
    variations Y.
    """
    point = bp.point
    alg = point.algebra
    e = point.field('e')
    bits = GeneratorPool(bp.generator_count).dual_pair() if bits is None else bits
    ghost = ACTION_GHOST_NUMBER
    basis = list(_basis(alg, 1, 2))
    Q_e = _dual_solve(point, lambda x, b: wedge(x, e, b), basis, _variation(bp, 'omega', basis, bits), 1, 1,
                      ghost=ghost)
    basis = list(_basis(alg, 1, 1))
    e_omega = _dual_solve(point, lambda x, b: -wedge(b, x), basis, _variation(bp, 'e', basis, bits), 2, 3,
                          ghost=ghost)
    out = {'e': Q_e}
    if point.theory == 'ym':
        lie = point.lie
        extra = (lie.dim, 1)
        basis = list(_basis(alg, 1, 0, extra))
        out['rho'] = _dual_solve(point, lambda x, b: lie.trace(x, b), basis, _variation(bp, 'A', basis, bits),
                                 2, 4, extra=extra, ghost=ghost)
    elif point.theory == 'spinor':
        gamma = point.gamma_form()
        psi, psibar = point.field('psi'), point.field('psibar')
        e2 = power(e, 2)
        out['psibar'] = spinor_lift(point, 1.0 / 6.0, wedge(e2, Q_e, psibar, gamma).scale(-0.25), 'psibar')
        out['psi'] = spinor_lift(point, 1.0 / 6.0, wedge(e2, Q_e, gamma, psi).scale(0.25), 'psi')
        mixed = wedge(out['psibar'], gamma, psi) - wedge(psibar, gamma, out['psi'])
        e_omega = e_omega + wedge(e2, mixed).scale(0.25j)
    out['e_omega'] = e_omega
    return out


def bfv_hvf(theory, bp, bits=None):
    """Q of the BFV action: Darboux read-off on the ghosts, pointwise solves on the fields."""
    _check_theory(theory, bp)
    parts = [hamiltonian_vf(kind, bp.point, bp.ghosts).components for kind in constraint_kinds(theory)]
    parts.append(antifield_geometric_components(bp, bits))
    return BFVVectorField(theory, _sum_components(parts), ghost_velocities(bp))


def odd_shift(form, generator):
    """epsilon form for a fresh odd constant epsilon = theta_generator, placed on the left."""
    bit = 1 << generator
    return form.same_shape({m | bit: a if merge_sign(bit, m) == 1 else -a for m, a in form.comps.items()},
                           ghost=ACTION_GHOST_NUMBER)


def ghost_flow(bp, velocities, generator):
    """Q_ghost(S): the ghosts move by epsilon R^phi and the epsilon coefficient is read off from the left.

    This is the pairing of the ghost and antifield blocks of Q, up to the
    Darboux factor.
    """
    g = bp.ghosts
    moved = GaugeParams(
        c=g.c + odd_shift(velocities['c'], generator),
        xi=VectorField([x + odd_shift(r, generator)
                        for x, r in zip(g.xi.components, velocities['xi'].components)]),
        lam=g.lam + odd_shift(velocities['lam'], generator),
        mu=g.mu + odd_shift(velocities['mu'], generator) if 'mu' in velocities else g.mu,
        generators=g.generators)
    return integrate(bfv_density(bp.with_ghosts(moved)), bp.point.grid).strip(1 << generator)


def antifield_degree(mask, antifield_mask):
    return popcount(mask & antifield_mask)


def check_bfv_hvf(theory, bp, rng, directions=None, tolerance=None):
    """varpi(Q, Y) = HVF_KAPPA delta_Y S along random projected directions, per field species."""
    directions = DEFAULTS['directions'] if directions is None else directions
    tolerance = DEFAULTS['tol_hvf'] if tolerance is None else tolerance
    pool = GeneratorPool(bp.generator_count)
    Q = bfv_hvf(theory, bp, bits=pool.dual_pair())
    point = bp.point
    bits = pool.dual_pair()
    sigma = structural_sigma(point)
    records = []
    for species in SPECIES[theory]:
        lhs, rhs = [], []
        for _ in range(directions):
            Y = project_direction(point, sample_direction(point, rng, species), bits, sigma)
            density = pairing_density(point, Q.geometric, tangent_components(point, Y))
            lhs.append(integrate(density, point.grid))
            moved = bp.with_point(perturbed(point, Y, bits))
            rhs.append(integrate(bfv_density(moved), point.grid).strip(bits))
        residual, relative, ratio = compare_fixed(lhs, rhs, HVF_KAPPA)
        passed = relative < tolerance
        logger.info('bfv hvf %s species %s: residual %.3e ratio %.6g %s', theory, species, relative, ratio.real,
                    'pass' if passed else 'FAIL')
        records.append({
            'theory': theory,
            'species': species,
            'kappa': HVF_KAPPA,
            'ratio': [ratio.real, ratio.imag],
            'residual_abs': residual,
            'residual_rel': relative,
            'directions': directions,
            'pass': bool(passed),
        })
    return records


def check_cme(theory, seed, resolution=None, K=None, budget=None, tolerance=None, ghosts=None, antifields=True,
              bp=None, **sampling):
    """{S, S} = iota_Q iota_Q varpi on a sampled BFV point.

    The field block gives varpi(Q, Q) over e, omega and the matter
    fields; the ghost block gives the derivative of S along the ghost
    flow.  The master equation holds when the field block equals
    CME_KAPPA times the ghost flow; the residual is reported per antifield
    degree.
    """
    tolerance = DEFAULTS['tol_spectral'] if tolerance is None else tolerance
    if bp is None:
        grid = TorusGrid(DEFAULTS['grid'] if resolution is None else resolution)
        bp = sample_bfv_point(theory, seed, K=K, grid=grid, budget=budget, ghosts=ghosts, antifields=antifields,
                              **sampling)
    _check_theory(theory, bp)
    point = bp.point
    pool = GeneratorPool(bp.generator_count)
    Q = bfv_hvf(theory, bp, bits=pool.dual_pair())
    field_part = integrate(pairing_density(point, Q.geometric, Q.geometric), point.grid)
    ghost_part = ghost_flow(bp, Q.ghosts, pool.take(1)[0])
    residual, relative, ratio = compare_fixed(field_part, ghost_part, CME_KAPPA)
    bracket = field_part - ghost_part * CME_KAPPA
    scale = max(1.0, field_part.max_abs(), ghost_part.max_abs())
    antifield_mask = bp.antifield_mask()
    by_degree = {}
    for m, v in bracket.comps.items():
        degree = str(antifield_degree(m, antifield_mask))
        by_degree[degree] = max(by_degree.get(degree, 0.0), abs(complex(v)) / scale)
    passed = relative < tolerance
    logger.info('cme %s: residual %.3e ratio %.6g %s', theory, relative, ratio.real, 'pass' if passed else 'FAIL')
    return {
        'theory': theory,
        'grade': GRADE_SPECTRAL,
        'kappa': CME_KAPPA,
        'ratio': [ratio.real, ratio.imag],
        'residual_abs': residual,
        'residual_rel': relative,
        'by_antifield_degree': by_degree,
        'field_max': field_part.max_abs(),
        'ghost_max': ghost_part.max_abs(),
        'resolution': point.grid.M,
        'seed': point.seed,
        'monomials': bracket.pruned(tolerance * scale).as_dict(),
        'pass': bool(passed),
    }


"""
Yang-Mills cancellation ledger
"""


class LedgerContext:
    """Quantities shared by the itemized terms of the Yang-Mills master equation."""

    def __init__(self, bp):
        point, g = bp.point, bp.ghosts
        if point.theory != 'ym':
            raise StructuralError('the cancellation ledger needs a Yang-Mills point, not {}'.format(point.theory))
        self.point = point
        self.grid = point.grid
        self.lie = point.lie
        self.c, self.xi, self.lam, self.mu = g.c, g.xi, g.lam, g.mu
        self.mu_dagger = bp.antifields['mu']
        self.en = point.en()
        self.lam_en = wedge(self.lam, self.en)
        self.cov0 = point.reference_covariant()
        A0 = point.reference_A()
        self.gauge0 = CovariantDerivative(self.grid, A=A0, lie=self.lie)
        self.gauge = CovariantDerivative(self.grid, A=point.field('A'), lie=self.lie)
        self.F0 = self.cov0.curvature()
        self.F_A0 = self.gauge0.gauge_curvature()
        self.X = lie_bracket(self.c, self.lam_en)
        self.Xa, self.Xn = frame_components(self.X, point)
        self.Y = self.cov0.lie_derivative(self.xi, self.lam_en)
        self.Ya, self.Yn = frame_components(self.Y, point)
        D = point.field('A') - A0
        self.D = D
        self.Da = [interior_coordinate(a, D) for a in range(point.algebra.form_dim)]
        frame = point.frame()
        self.frame_vectors = [vector_form(point.algebra, frame[..., b, :], bandwidth=point.K)
                              for b in range(point.algebra.form_dim)]
        self.xi_bracket = vector_bracket(self.xi, self.xi, self.grid)
        self._cache = {}

    def components(self, Z):
        return frame_components(Z, self.point)[0]

    def rebuild(self, coefficients):
        """Z^(b) e_b from frame components."""
        return _total(wedge(z, e) for z, e in zip(coefficients, self.frame_vectors))

    def contract(self, coefficients):
        """Z^(a) (A - A0)_a."""
        return _total(wedge(z, d) for z, d in zip(coefficients, self.Da))

    def along(self, coefficients, form):
        """Z^(a) iota_a form."""
        return _total(wedge(z, interior_coordinate(a, form)) for a, z in enumerate(coefficients))

    def lie_xi(self, form):
        return self.cov0.lie_derivative(self.xi, form)

    def gauge_lie(self, form):
        return self.gauge0.lie_derivative(self.xi, form, 'lie')

    def frame_lie(self, b):
        """Frame components of L^omega0_xi(e_b)."""
        if b not in self._cache:
            self._cache[b] = self.components(self.lie_xi(self.frame_vectors[b]))
        return self._cache[b]

    def frame_mix(self, coefficients):
        """Components (a) of Z^(b) L^omega0_xi(e_b)."""
        dim = len(coefficients)
        return [_total(wedge(coefficients[b], self.frame_lie(b)[a]) for b in range(dim)) for a in range(dim)]

    def xi_mix(self, coefficients):
        """Z^(b) d_b xi^a."""
        dim = len(coefficients)
        return [_total(wedge(coefficients[b], partial(self.xi.components[a], b, self.grid)) for b in range(dim))
                for a in range(dim)]

    def density(self, value):
        return self.lie.trace(value, self.mu_dagger)


def _double_iota_F_A0(ctx):
    return iota_vector(ctx.xi, iota_vector(ctx.xi, ctx.F_A0))


LEDGER_TERMS = {
    '0011.1': lambda x: x.contract(x.components(lie_bracket(x.c, x.rebuild(x.Xa)))),
    '0011.2': lambda x: -x.contract(x.frame_mix(x.Xa)),
    '0011.3': lambda x: -x.contract(x.xi_mix(x.Xa)),
    '0011.4': lambda x: -x.contract(x.components(lie_bracket(x.c, x.rebuild(x.Ya)))),
    '0011.5': lambda x: x.contract(x.frame_mix(x.Ya)),
    '0011.6': lambda x: x.contract(x.xi_mix(x.Ya)),
    '0111.1': lambda x: x.along(x.Xa, x.gauge_lie(x.D)),
    '0111.2': lambda x: -x.along(x.Ya, x.gauge_lie(x.D)),
    '0111.3': lambda x: x.along(x.Xa, iota_vector(x.xi, x.F_A0)),
    '0111.4': lambda x: -x.along(x.Ya, iota_vector(x.xi, x.F_A0)),
    '0111.5': lambda x: -x.along(x.Xa, x.gauge.d(x.mu, 'lie')),
    '0111.6': lambda x: x.along(x.Ya, x.gauge.d(x.mu, 'lie')),
    '1011g.1': lambda x: -x.contract(x.components(x.lie_xi(wedge(x.Xn, x.en)))),
    '1011g.2': lambda x: x.contract(x.components(x.lie_xi(wedge(x.Yn, x.en)))),
    '1011g.3': lambda x: x.contract(x.components(lie_bracket(x.lie_xi(x.c), x.lam_en))),
    '1011g.4': lambda x: -x.contract(x.components(lie_bracket(lie_bracket(x.c, x.c), x.lam_en))).scale(0.5),
    '1011g.5': lambda x: -x.contract(x.components(lie_bracket(x.c, wedge(x.Yn, x.en)))),
    '1011g.6': lambda x: x.contract(x.components(lie_bracket(x.c, wedge(x.Xn, x.en)))),
    '1011g.7': lambda x: -x.contract(x.components(
        lie_bracket(iota_vector(x.xi, iota_vector(x.xi, x.F0)), x.lam_en))).scale(0.5),
    '1011g.8': lambda x: -x.along(x.Xa, iota_vector(x.xi, x.F_A0)),
    '1011g.9': lambda x: x.along(x.Ya, iota_vector(x.xi, x.F_A0)),
    '1011g.10': lambda x: iota_vector(x.xi_bracket, iota_vector(x.xi, x.F_A0)).scale(0.5),
    '1011g.11': lambda x: -x.along(x.Xa, x.gauge0.d(x.mu, 'lie')),
    '1011g.12': lambda x: x.along(x.Ya, x.gauge0.d(x.mu, 'lie')),
    '1011g.13': lambda x: iota_vector(x.xi_bracket, x.gauge0.d(x.mu, 'lie')).scale(0.5),
    '1011g.14': lambda x: -x.contract(x.components(iota_vector(x.xi_bracket, x.cov0.d(x.lam_en)))).scale(0.5),
    '1011g.15': lambda x: x.contract(x.components(x.along(x.Xa, x.cov0.d(x.lam_en)))),
    '1011g.16': lambda x: -x.contract(x.components(x.along(x.Ya, x.cov0.d(x.lam_en)))),
    '1111g.1': lambda x: x.gauge_lie(_double_iota_F_A0(x)).scale(0.5),
    '1111g.2': lambda x: x.lie.bracket(x.mu, x.gauge_lie(x.mu)),
    '1111g.3': lambda x: -x.gauge_lie(x.gauge_lie(x.mu)),
    '1111g.4': lambda x: x.contract([x.lie_xi(y) for y in x.Ya]),
    '1111g.5': lambda x: -x.contract([x.lie_xi(y) for y in x.Xa]),
    '1111g.6': lambda x: _total(wedge(y, x.gauge_lie(d)) for y, d in zip(x.Ya, x.Da)),
    '1111g.7': lambda x: -_total(wedge(y, x.gauge_lie(d)) for y, d in zip(x.Xa, x.Da)),
    '1111g.8': lambda x: x.lie.bracket(_double_iota_F_A0(x), x.mu).scale(0.5),
    '1111g.9': lambda x: x.lie.bracket(x.lie.bracket(x.mu, x.mu), x.mu).scale(0.5),
    '1111g.10': lambda x: -x.lie.bracket(x.mu, x.gauge_lie(x.mu)),
    '1111g.11': lambda x: _total(wedge(y, x.lie.bracket(d, x.mu)) for y, d in zip(x.Ya, x.Da)),
    '1111g.12': lambda x: -_total(wedge(y, x.lie.bracket(d, x.mu)) for y, d in zip(x.Xa, x.Da)),
}

# group id -> (grade, vanishing mode, terms); 'boundary' groups vanish after integration
LEDGER_GROUPS = {
    'jacobi-c': (GRADE_EXACT, 'pointwise', ('0011.1', '1011g.6', '1011g.4')),
    'lie-of-bracket': (GRADE_SPECTRAL, 'pointwise',
                       ('0011.2', '0011.4', '1011g.1', '1011g.3', '1011g.5', '1111g.5')),
    'double-lie': (GRADE_SPECTRAL, 'pointwise', ('0011.5', '1011g.2', '1011g.7', '1011g.14', '1111g.4')),
    'gauge-lie-c': (GRADE_SPECTRAL, 'pointwise', ('0011.3', '0111.1', '1111g.7')),
    'gauge-lie-xi': (GRADE_SPECTRAL, 'pointwise', ('0011.6', '0111.2', '1111g.6')),
    'curvature-c': (GRADE_EXACT, 'pointwise', ('0111.3', '1011g.8')),
    'curvature-xi': (GRADE_EXACT, 'pointwise', ('0111.4', '1011g.9')),
    'mu-lie': (GRADE_EXACT, 'pointwise', ('1111g.2', '1111g.10')),
    'lambda-squared-c': (GRADE_EXACT, 'pointwise', ('1011g.15',)),
    'lambda-squared-xi': (GRADE_EXACT, 'pointwise', ('1011g.16',)),
    'jacobi-mu': (GRADE_EXACT, 'pointwise', ('1111g.9',)),
    'covariant-mu-c': (GRADE_SPECTRAL, 'pointwise', ('1011g.11', '1111g.12', '0111.5')),
    'covariant-mu-xi': (GRADE_SPECTRAL, 'pointwise', ('1011g.12', '1111g.11', '0111.6')),
    'boundary': (GRADE_SPECTRAL, 'integral', ('1011g.10', '1111g.1')),
    'double-gauge-lie': (GRADE_SPECTRAL, 'pointwise', ('1011g.13', '1111g.3', '1111g.8')),
}


def ledger_coverage():
    """Terms missing from every group and terms claimed by more than one."""
    seen = {}
    for group, (_, _, terms) in LEDGER_GROUPS.items():
        for term in terms:
            seen.setdefault(term, []).append(group)
    missing = sorted(set(LEDGER_TERMS) - set(seen))
    repeated = sorted(t for t, groups in seen.items() if len(groups) > 1)
    unknown = sorted(set(seen) - set(LEDGER_TERMS))
    return missing, repeated, unknown


def appendix_ledger_ym(seed, resolution=None, K=None, budget=None, tolerances=None, bp=None,
                       reference_amplitude=0.2, **sampling):
    """Evaluate every itemized term of the Yang-Mills master equation and each cancellation group."""
    tolerances = tolerances or {}
    missing, repeated, unknown = ledger_coverage()
    if missing or repeated or unknown:
        raise StructuralError('cancellation groups do not partition the ledger: missing {}, repeated {}, '
                              'unknown {}'.format(missing, repeated, unknown))
    if bp is None:
        grid = TorusGrid(DEFAULTS['grid'] if resolution is None else resolution)
        bp = sample_bfv_point('ym', seed, K=K, grid=grid, budget=budget, reference_amplitude=reference_amplitude,
                              **sampling)
    ctx = LedgerContext(bp)
    grid = ctx.grid
    densities = {}
    for term, build in LEDGER_TERMS.items():
        densities[term] = ctx.density(build(ctx))
    group_of = {t: g for g, (_, _, terms) in LEDGER_GROUPS.items() for t in terms}
    term_records = []
    for term, density in densities.items():
        value = integrate(density, grid)
        term_records.append({
            'term': term,
            'group': group_of[term],
            'value': value.pruned(1e-14).as_dict(),
            'max_abs': density.max_abs(),
        })
    group_records = []
    for group, (grade, mode, terms) in LEDGER_GROUPS.items():
        tolerance = tolerances.get(grade, DEFAULTS['tol_exact'] if grade == GRADE_EXACT else
                                   DEFAULTS['tol_spectral'])
        total = _total(densities[t] for t in terms)
        scale = max([1.0] + [densities[t].max_abs() for t in terms])
        if mode == 'integral':
            residual = integrate(total, grid).max_abs()
        else:
            residual = total.max_abs()
        relative = residual / scale
        passed = relative < tolerance
        logger.info('ledger group %s (%s): residual %.3e %s', group, grade, relative, 'pass' if passed else 'FAIL')
        group_records.append({
            'group': group,
            'grade': grade,
            'mode': mode,
            'terms': list(terms),
            'residual_abs': residual,
            'residual_rel': relative,
            'pass': bool(passed),
        })
    return {
        'theory': 'ym',
        'seed': bp.point.seed,
        'resolution': grid.M,
        'terms': term_records,
        'groups': group_records,
        'coverage': {'terms': len(LEDGER_TERMS), 'assigned': len(group_of)},
        'pass': all(g['pass'] for g in group_records),
    }
