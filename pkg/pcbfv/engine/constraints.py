#!/usr/bin/env python3

"""
Constraints

Boundary constraint functionals L_c, P_xi, H_lambda (and M_mu for
Yang-Mills) of Palatini-Cartan gravity coupled to a scalar field, a
Yang-Mills field or a spinor, their Hamiltonian vector fields and the
Poisson brackets computed through the boundary symplectic form.

Every Grassmann parameter owns its generators, so a bracket such as
{L_c, L_c} is a GrassmannScalar whose theta_1 theta_2 block carries the
bilinear result.  Directional derivatives use an even nilpotent dual
number t = theta_a theta_b built from two fresh generators.

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

from engine.constant import (DEFAULTS, EXACT_GRADE_RELATIONS, GRADE_EXACT, GRADE_SPECTRAL,
                             SPECTRAL_GRADE_RELATIONS)
from engine.errors import ConfigError, StructuralError
from engine.fields import (exterior_d, integrate, random_section, random_vector_field, sample_config,
                           spinor_current, structural_source, TorusGrid, vector_bracket)
from engine.framelin import decompose_omega, graded_solve, lift, stacked_solve
from engine.galg import (GrassmannScalar, MixedForm, VectorField, eta_pair, interior_coordinate, iota_vector,
                         j_internal, lie_bracket, power, vector_form, wedge)

logger = logging.getLogger(__name__)

CONSTRAINT_KINDS = ('L', 'P', 'H', 'M')

# species of tangent directions per theory
SPECIES = {
    'pc': ('e', 'omega'),
    'scalar': ('e', 'omega', 'phi', 'p'),
    'ym': ('e', 'omega', 'A', 'rho'),
    'spinor': ('e', 'omega', 'psi', 'psibar'),
}

# varpi(X_F, Y) = HVF_KAPPA delta_Y F for the left contraction used by pairing_density
HVF_KAPPA = -1.0
# varpi(X_F, X_G) = kappa times the tabulated bracket; a self-bracket {F, F} counts both one-sided terms
SELF_BRACKET_KAPPA = 2.0
CROSS_BRACKET_KAPPA = 1.0


"""
Gauge parameters
"""


class GeneratorPool:
    """Hands out fresh Grassmann generator indices."""

    def __init__(self, start=0):
        self.next = start

    def take(self, count):
        out = list(range(self.next, self.next + count))
        self.next += count
        return out

    def dual_pair(self):
        """Mask of an even nilpotent t = theta_a theta_b from two fresh generators."""
        a, b = self.take(2)
        return (1 << a) | (1 << b)


class GaugeParams:
    """Odd gauge parameters of the constraints.

    Attributes
    ----------
    c : MixedForm (0,2) or None
    xi : VectorField or None
    lam : MixedForm (0,0) or None
    mu : MixedForm (0,0) with Lie-algebra values, or None
    generators : dict
        name -> generator indices owned by each parameter.
    """

    def __init__(self, c=None, xi=None, lam=None, mu=None, generators=None):
        self.c = c
        self.xi = xi
        self.lam = lam
        self.mu = mu
        self.generators = dict(generators or {})

    def __repr__(self):
        present = [n for n in ('c', 'xi', 'lam', 'mu') if getattr(self, n) is not None]
        return 'GaugeParams({})'.format(', '.join(present))

    def replace(self, **updates):
        values = {n: getattr(self, n) for n in ('c', 'xi', 'lam', 'mu')}
        values.update(updates)
        return GaugeParams(generators=self.generators, **values)

    def scale(self, factor):
        return GaugeParams(c=None if self.c is None else self.c.scale(factor),
                           xi=None if self.xi is None else self.xi.scale(factor),
                           lam=None if self.lam is None else self.lam.scale(factor),
                           mu=None if self.mu is None else self.mu.scale(factor),
                           generators=self.generators)


def sample_params(point, rng, names, pool, budget=None, K=None, amplitude=0.5):
    """Random odd parameters, each on its own block of generators."""
    budget = DEFAULTS['grassmann'] if budget is None else budget
    K = point.K if K is None else K
    alg, grid = point.algebra, point.grid
    values, generators = {}, {}
    for name in names:
        gens = pool.take(budget)
        masks = [1 << g for g in gens]
        generators[name] = gens
        if name == 'c':
            values['c'] = random_section(rng, alg, 0, 2, K, grid, masks=masks, amplitude=amplitude, ghost=1)
        elif name == 'xi':
            values['xi'] = random_vector_field(rng, alg, K, grid, masks=masks, amplitude=amplitude, ghost=1)
        elif name == 'lam':
            values['lam'] = random_section(rng, alg, 0, 0, K, grid, masks=masks, amplitude=amplitude, ghost=1)
        elif name == 'mu':
            if point.lie is None:
                raise ConfigError('mu parameter needs a Yang-Mills point')
            values['mu'] = random_section(rng, alg, 0, 0, K, grid, extra=(point.lie.dim, 1), masks=masks,
                                          amplitude=amplitude, ghost=1)
        else:
            raise ConfigError('Unknown gauge parameter {}'.format(name))
    return GaugeParams(generators=generators, **values)


def _require(kind, theory, value, name):
    if kind == 'M' and theory != 'ym':
        raise StructuralError('M constraint exists only for the Yang-Mills theory, not {}'.format(theory))
    if kind not in CONSTRAINT_KINDS:
        raise StructuralError('Unknown constraint kind {}'.format(kind))
    if value is None:
        raise StructuralError('{} constraint needs the parameter {}'.format(kind, name))


PARAMETER_OF = {'L': 'c', 'P': 'xi', 'H': 'lam', 'M': 'mu'}


"""
Constraint densities
"""


def dirac_current(point, cov):
    """psibar gamma d_omega psi - d_omega psibar gamma psi, in Omega^(1,1)."""
    gamma = point.gamma_form()
    psi, psibar = point.field('psi'), point.field('psibar')
    return (wedge(psibar, gamma, cov.d(psi, 'psi')) -
            wedge(cov.d(psibar, 'psibar'), gamma, psi))


def _torsion_term(point, cov):
    """e d_omega e, spinor-corrected for the spinor theory."""
    e = point.field('e')
    term = wedge(e, cov.d(e))
    if point.theory == 'spinor':
        term = term - spinor_current(point, power(e, 3)).scale(1j / 48.0)
    return term


def constraint_density(kind, point, params):
    """Top-degree integrand of a constraint."""
    _require(kind, point.theory, getattr(params, PARAMETER_OF.get(kind, 'c'), None), PARAMETER_OF.get(kind, '?'))
    theory = point.theory
    e = point.field('e')
    cov = point.covariant()
    if kind == 'L':
        return wedge(params.c, _torsion_term(point, cov))
    if kind == 'M':
        return point.lie.trace(params.mu, cov.d(point.field('rho'), 'lie'))
    if kind == 'P':
        xi = params.xi
        density = (wedge(iota_vector(xi, power(e, 2)), cov.curvature()).scale(0.5) +
                   wedge(iota_vector(xi, point.field('omega') - point.reference()), _torsion_term(point, cov)))
        if theory == 'scalar':
            density = density + wedge(iota_vector(xi, point.field('p')), exterior_d(point.field('phi'), point.grid))
        elif theory == 'ym':
            lie = point.lie
            rho = point.field('rho')
            density = (density + lie.trace(iota_vector(xi, rho), cov.gauge_curvature()) +
                       lie.trace(iota_vector(xi, point.field('A') - point.reference_A()), cov.d(rho, 'lie')))
        elif theory == 'spinor':
            density = density + wedge(iota_vector(xi, power(e, 3)), dirac_current(point, cov)).scale(1j / 12.0)
        return density
    # H
    lam_en = wedge(params.lam, point.en())
    bracket = wedge(e, cov.curvature()) + power(e, 3).scale(point.Lambda / 6.0)
    if theory == 'scalar':
        Pi = point.field('Pi')
        dphi = exterior_d(point.field('phi'), point.grid)
        bracket = (bracket + wedge(power(e, 2), Pi, dphi).scale(0.5) +
                   wedge(power(e, 3), eta_pair(Pi, Pi)).scale(1.0 / 12.0))
    elif theory == 'ym':
        lie = point.lie
        B = point.field('B')
        bracket = (bracket + wedge(e, lie.trace(B, cov.gauge_curvature())) +
                   wedge(power(e, 3), lie.trace_pair(B, B)).scale(1.0 / 12.0))
    elif theory == 'spinor':
        bracket = bracket + wedge(power(e, 2), dirac_current(point, cov)).scale(0.25j)
    return wedge(lam_en, bracket)


def eval_constraint(kind, point, params):
    """Integral of a constraint density, a GrassmannScalar."""
    return integrate(constraint_density(kind, point, params), point.grid)


"""
Hamiltonian vector fields
"""


class HamiltonianVF:
    """Components of the Hamiltonian vector field of one constraint.

    The connection component is stored as e ^ X_omega under the key
    'e_omega'; omega_lift() returns the minimum-norm X_omega, which has no
    part along Ker W1(1,2).
    """

    def __init__(self, kind, point, components):
        self.kind = kind
        self.point = point
        self.components = dict(components)

    def __repr__(self):
        return 'HamiltonianVF({}, {})'.format(self.kind, sorted(self.components))

    def __getitem__(self, name):
        return self.components[name]

    def get(self, name):
        return self.components.get(name)

    def max_abs(self):
        return max((c.max_abs() for c in self.components.values()), default=0.0)

    def omega_lift(self):
        target = self.components.get('e_omega')
        if target is None:
            return None, 0.0
        return lift(self.point.coframe(), 1, 1, 2, target)


def structural_sigma(point):
    """sigma of the omega decomposition at the (enforced) point."""
    sigma, _ = decompose_omega(point.coframe(), structural_source(point))
    return sigma


def _hvf_L(point, c):
    e = point.field('e')
    cov = point.covariant()
    out = {'e': lie_bracket(c, e), 'e_omega': wedge(e, cov.d(c))}
    if point.theory == 'spinor':
        gens = point.spin_generators()
        out['psi'] = lie_bracket(c, point.field('psi'), spin='psi', generators=gens)
        out['psibar'] = lie_bracket(c, point.field('psibar'), spin='psibar', generators=gens)
    elif point.theory == 'scalar':
        out['phi'] = MixedForm(point.algebra, 0, 0, {}, ghost=c.ghost)
        out['p'] = MixedForm(point.algebra, 3, 4, {}, ghost=c.ghost)
    return out


def _hvf_P(point, xi):
    e = point.field('e')
    cov0 = point.reference_covariant()
    out = {
        'e': -cov0.lie_derivative(xi, e),
        'e_omega': -wedge(e, cov0.connection_lie_derivative(xi, point.field('omega'))),
    }
    if point.theory == 'scalar':
        # odd xi: p flows along +L_xi against the p ^ phi term of varpi
        out['p'] = cov0.lie_derivative(xi, point.field('p'))
        out['phi'] = -iota_vector(xi, exterior_d(point.field('phi'), point.grid))
    elif point.theory == 'ym':
        A0 = point.reference_A()
        gauge0 = cov0.with_connection(omega=cov0.omega, A=A0)
        out['rho'] = -gauge0.lie_derivative(xi, point.field('rho'), 'lie')
        flat = gauge0.with_connection(omega=None, A=A0)
        out['A'] = -(flat.lie_derivative(xi, point.field('A') - A0, 'lie') +
                     iota_vector(xi, flat.gauge_curvature()))
    elif point.theory == 'spinor':
        out['psi'] = -cov0.lie_derivative(xi, point.field('psi'), 'psi')
        out['psibar'] = -cov0.lie_derivative(xi, point.field('psibar'), 'psibar')
    return out


def spinor_lift(point, coefficient, rhs, kind):
    """Pointwise solve of e^3/3! gamma X = rhs (kind 'psi') or e^3/3! X gamma = rhs ('psibar')."""
    e3 = power(point.field('e'), 3)
    gamma = point.gamma_form()
    if kind == 'psi':
        blocks = [lambda x: wedge(e3, gamma, x).scale(coefficient)]
        extra = (4, 1)
    else:
        blocks = [lambda x: wedge(e3, x, gamma).scale(coefficient)]
        extra = (1, 4)
    return stacked_solve(blocks, [rhs], point.algebra, 0, 0, extra=extra, batch=point.grid.shape, dtype=complex,
                         parity=1, name='spinor {} lift'.format(kind))


def _hvf_H(point, lam):
    e = point.field('e')
    en = point.en()
    cov = point.covariant()
    F = cov.curvature()
    lam_en = wedge(lam, en)
    sigma = structural_sigma(point)
    X_e = cov.d(lam_en) + wedge(lam, sigma)
    inner = F + power(e, 2).scale(0.5 * point.Lambda)
    out = {}
    if point.theory == 'scalar':
        Pi = point.field('Pi')
        dphi = exterior_d(point.field('phi'), point.grid)
        inner = inner + wedge(e, Pi, dphi) + wedge(power(e, 2), eta_pair(Pi, Pi)).scale(0.25)
        e_omega = wedge(lam_en, inner) - wedge(lam, power(e, 2), Pi, eta_pair(Pi, en)).scale(0.5)
        out['p'] = -cov.d(wedge(lam_en, power(e, 2), Pi).scale(0.5))
        out['phi'] = -wedge(lam, eta_pair(Pi, en))
    elif point.theory == 'ym':
        lie = point.lie
        B = point.field('B')
        inner = (inner + wedge(power(e, 2), lie.trace_pair(B, B)).scale(0.25) +
                 lie.trace(B, cov.gauge_curvature()))
        e_omega = (wedge(lam_en, inner) -
                   wedge(lam, e, lie.trace(B, eta_pair(B, wedge(en, e)))))
        out['rho'] = cov.d(wedge(lam_en, e, B), 'lie')
        out['A'] = wedge(lam, eta_pair(B, wedge(e, en)))
    elif point.theory == 'spinor':
        gamma = point.gamma_form()
        psi, psibar = point.field('psi'), point.field('psibar')
        jn = j_internal(gamma, en)
        je = j_internal(gamma, e)
        X_e = X_e + wedge(lam, psibar, wedge(jn, je, gamma) - wedge(gamma, jn, je), psi).scale(0.25j)
        e_omega = (wedge(lam_en, inner) -
                   wedge(lam_en, e, dirac_current(point, cov)).scale(0.25j))
        en_e2 = wedge(en, power(e, 2))
        jj = j_internal(gamma, j_internal(gamma, en_e2))
        spin_term = wedge(psibar, wedge(jj, gamma) - wedge(gamma, jj), psi)
        rhs_psi = (wedge(lam_en, power(e, 2), gamma, cov.d(psi, 'psi')).scale(0.5) -
                   wedge(lam_en, e, cov.d(e), gamma, psi).scale(0.25) +
                   wedge(lam, e, spin_term, gamma, psi).scale(1j / 64.0))
        rhs_psibar = (wedge(lam_en, power(e, 2), cov.d(psibar, 'psibar'), gamma).scale(0.5) +
                      wedge(lam_en, e, cov.d(e), psibar, gamma).scale(0.25) -
                      wedge(lam, e, psibar, gamma, spin_term).scale(1j / 64.0))
        out['psi'] = spinor_lift(point, 1.0 / 6.0, rhs_psi, 'psi')
        out['psibar'] = spinor_lift(point, 1.0 / 6.0, rhs_psibar, 'psibar')
    else:
        e_omega = wedge(lam_en, inner)
    out['e'] = X_e
    out['e_omega'] = e_omega
    return out


def _hvf_M(point, mu):
    cov = point.covariant()
    return {
        'A': cov.with_connection(omega=None, A=point.field('A')).d(mu, 'lie'),
        'rho': point.lie.bracket(mu, point.field('rho')),
    }


def hamiltonian_vf(kind, point, params):
    """Hamiltonian vector field of a constraint, from its printed components."""
    name = PARAMETER_OF.get(kind)
    value = getattr(params, name, None) if name else None
    _require(kind, point.theory, value, name)
    builder = {'L': _hvf_L, 'P': _hvf_P, 'H': _hvf_H, 'M': _hvf_M}[kind]
    return HamiltonianVF(kind, point, builder(point, value))


"""
Symplectic form
"""


def _half_pairing(point, X, Y):
    """Sum of the one-sided terms K X_a Y_b of the boundary two-form."""
    terms = []
    e = point.field('e')
    if X.get('e') is not None and Y.get('e_omega') is not None:
        terms.append(wedge(X['e'], Y['e_omega']))
    if point.theory == 'scalar' and X.get('p') is not None and Y.get('phi') is not None:
        terms.append(wedge(X['p'], Y['phi']))
    elif point.theory == 'ym' and X.get('rho') is not None and Y.get('A') is not None:
        terms.append(point.lie.trace(X['rho'], Y['A']))
    elif point.theory == 'spinor':
        gamma = point.gamma_form()
        if X.get('psibar') is not None and Y.get('psi') is not None:
            terms.append(wedge(power(e, 3), X['psibar'], gamma, Y['psi']).scale(1j / 6.0))
        if X.get('e') is not None:
            mixed = None
            if Y.get('psibar') is not None:
                mixed = wedge(Y['psibar'], gamma, point.field('psi'))
            if Y.get('psi') is not None:
                other = wedge(point.field('psibar'), gamma, Y['psi'])
                mixed = -other if mixed is None else mixed - other
            if mixed is not None:
                terms.append(wedge(power(e, 2), X['e'], mixed).scale(-0.25j))
    if not terms:
        return None
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total


EVEN_FIELDS = ('e', 'e_omega', 'phi', 'p', 'A', 'rho')


def tangent_parity(components):
    """Grassmann parity of a tangent vector, read off an even field component."""
    for name in EVEN_FIELDS:
        value = components.get(name)
        if value is not None and value.comps:
            return value.grassmann_parity()
    for name in ('psi', 'psibar'):
        value = components.get(name)
        if value is not None and value.comps:
            return (value.grassmann_parity() + 1) % 2
    return 0


def pairing_density(point, X, Y):
    """Density of varpi(X, Y) = sum of K X_a Y_b - (-1)^(|X||Y|) K Y_a X_b over the terms K da db.

    Two odd vectors pair symmetrically, so varpi(Q, Q) does not vanish
    for an odd Q.
    """
    X = X.components if isinstance(X, HamiltonianVF) else X
    Y = Y.components if isinstance(Y, HamiltonianVF) else Y
    forward = _half_pairing(point, X, Y)
    backward = _half_pairing(point, Y, X)
    if backward is not None and tangent_parity(X) * tangent_parity(Y) % 2 == 0:
        backward = -backward
    if forward is None:
        return backward
    if backward is None:
        return forward
    return forward + backward


def symplectic_pairing(point, X, Y):
    density = pairing_density(point, X, Y)
    if density is None:
        return GrassmannScalar()
    return integrate(density, point.grid)


def poisson_bracket(F, G, point):
    """{F, G} = varpi(X_F, X_G) for F, G given as (kind, params)."""
    X = hamiltonian_vf(F[0], point, F[1])
    Y = hamiltonian_vf(G[0], point, G[1])
    return symplectic_pairing(point, X, Y)


"""
Tangent directions and directional derivatives
"""


def dual(form, bits):
    """t form for the even nilpotent t = theta^bits; bits are the top generators."""
    return form.shifted(lambda m: m | bits)


def perturbed(point, direction, bits):
    updates = {name: point.field(name) + dual(Y, bits) for name, Y in direction.items()}
    return point.with_fields(updates)


def directional_derivative(function, point, direction, bits):
    """d/dt function(point + t direction) at t = 0, exact through t^2 = 0."""
    return function(perturbed(point, direction, bits)).strip(bits)


def sample_direction(point, rng, species, amplitude=0.5):
    """Random variation of one field species; odd fields reuse the point's generators."""
    alg, grid, K = point.algebra, point.grid, point.K
    if species == 'e':
        return {'e': random_section(rng, alg, 1, 1, K, grid, amplitude=amplitude)}
    if species == 'omega':
        return {'omega': random_section(rng, alg, 1, 2, K, grid, amplitude=amplitude)}
    if species == 'phi':
        return {'phi': random_section(rng, alg, 0, 0, K, grid, amplitude=amplitude)}
    if species == 'p':
        return {'p': random_section(rng, alg, 3, 4, K, grid, amplitude=amplitude)}
    if species == 'A':
        return {'A': random_section(rng, alg, 1, 0, K, grid, extra=(point.lie.dim, 1), amplitude=amplitude)}
    if species == 'rho':
        return {'rho': random_section(rng, alg, 2, 4, K, grid, extra=(point.lie.dim, 1), amplitude=amplitude)}
    if species in ('psi', 'psibar'):
        extra = (4, 1) if species == 'psi' else (1, 4)
        masks = [1 << g for g in point.generators[species]]
        return {species: random_section(rng, alg, 0, 0, K, grid, extra=extra, masks=masks, amplitude=amplitude,
                                        complex_values=True)}
    raise ConfigError('Unknown direction species {}'.format(species))


def project_direction(point, direction, bits, sigma=None):
    """Correct the omega variation so the direction keeps the structural constraint.

    The first-order change of T = e_n (d_omega e - ...) is split as
    e dsigma + e_n [w, e]; subtracting w from the omega variation removes
    the component that would leave the representative.
    """
    touches = set(direction) & {'e', 'omega', 'psi', 'psibar'}
    if not touches:
        return dict(direction)
    sigma = structural_sigma(point) if sigma is None else sigma
    delta_T = structural_source(perturbed(point, direction, bits)).strip(bits)
    if 'e' in direction:
        delta_T = delta_T - wedge(direction['e'], sigma)
    _, w = decompose_omega(point.coframe(), delta_T)
    out = dict(direction)
    out['omega'] = direction['omega'] - w if 'omega' in direction else -w
    return out


def tangent_components(point, direction):
    """Pairing components of a direction: omega is carried as e ^ Y_omega."""
    out = {k: v for k, v in direction.items() if k != 'omega'}
    if 'omega' in direction:
        out['e_omega'] = wedge(point.field('e'), direction['omega'])
    return out


"""
Frame components and composite parameters
"""


def frame_components(Z, point):
    """Z = Z^(a) e_a + Z^(n) e_n pointwise; returns ([Z^(1), Z^(2), Z^(3)], Z^(n))."""
    if (Z.i, Z.j) != (0, 1):
        raise StructuralError('frame components need an internal vector, got ({}, {})'.format(Z.i, Z.j))
    N = point.algebra.N
    e = point.field('e')
    operator = {}
    for m, a in e.comps.items():
        rows = -a[..., :, :, 0, 0]
        last = point.normal if m == 0 else np.zeros_like(point.normal)
        last = np.broadcast_to(last, rows.shape[:-2] + (1, N))
        operator[m] = np.swapaxes(np.concatenate([rows, last], axis=-2), -1, -2)
    batch = operator[0].shape[:-2] if 0 in operator else ()
    rhs = {m: np.broadcast_to(a[..., 0, :, 0, 0], batch + (N,)) for m, a in Z.comps.items()}
    solution = graded_solve(operator, rhs, 0, rtol=point.threshold, name='frame (e_a, e_n)')
    comps = [dict() for _ in range(N)]
    for m, x in solution.items():
        for k in range(N):
            comps[k][m] = x[..., k][..., None, None, None, None]
    forms = [MixedForm(point.algebra, 0, 0, c, ghost=Z.ghost, bandwidth=None) for c in comps]
    return forms[:-1], forms[-1]


def reconstruct_from_components(Za, Zn, point):
    """Resubstitution Z^(a) e_a + Z^(n) e_n."""
    frame = point.frame()
    total = wedge(Zn, point.en())
    for a, component in enumerate(Za):
        total = total + wedge(component, vector_form(point.algebra, frame[..., a, :], bandwidth=None))
    return total


def composite_params(Z, point):
    """Parameters (Z^(a), Z^(a)(omega - omega0)_a, Z^(n), Z^(a)(A - A0)_a) of the LH and PH tables."""
    Za, Zn = frame_components(Z, point)
    difference = point.field('omega') - point.reference()
    c = None
    for a, component in enumerate(Za):
        term = wedge(component, interior_coordinate(a, difference))
        c = term if c is None else c + term
    mu = None
    if point.theory == 'ym':
        gauge = point.field('A') - point.reference_A()
        for a, component in enumerate(Za):
            term = wedge(component, interior_coordinate(a, gauge))
            mu = term if mu is None else mu + term
    return GaugeParams(c=c, xi=VectorField(Za), lam=Zn, mu=mu)


"""
Verification
"""


def compare_fixed(lhs, rhs, kappa):
    """Residual of lhs = kappa rhs over all monomials of several samples.

    Returns (residual_abs, residual_rel, ratio).  The ratio is the
    least-squares <rhs, lhs> / <rhs, rhs>; it is reported, never used to
    decide a check.
    """
    lhs = [lhs] if isinstance(lhs, GrassmannScalar) else list(lhs)
    rhs = [rhs] if isinstance(rhs, GrassmannScalar) else list(rhs)
    scale = max([1.0] + [x.max_abs() for x in lhs + rhs])
    residual = max(((l - r * kappa).max_abs() for l, r in zip(lhs, rhs)), default=0.0)
    numerator = sum((r.inner(l) for l, r in zip(lhs, rhs)), 0j)
    denominator = sum((r.inner(r) for r in rhs), 0j).real
    ratio = complex(numerator / denominator) if denominator else 0j
    return residual, residual / scale, ratio


def check_hvf(kind, point, params, rng, pool, directions=None, tolerance=None):
    """Validate varpi(X_F, Y) = HVF_KAPPA delta_Y F against random projected directions per field species."""
    directions = DEFAULTS['directions'] if directions is None else directions
    tolerance = DEFAULTS['tol_hvf'] if tolerance is None else tolerance
    X = hamiltonian_vf(kind, point, params)
    bits = pool.dual_pair()
    sigma = structural_sigma(point)
    records = []
    for species in SPECIES[point.theory]:
        lhs, rhs = [], []
        for _ in range(directions):
            Y = project_direction(point, sample_direction(point, rng, species), bits, sigma)
            lhs.append(symplectic_pairing(point, X, tangent_components(point, Y)))
            rhs.append(directional_derivative(lambda p: eval_constraint(kind, p, params), point, Y, bits))
        residual, relative, ratio = compare_fixed(lhs, rhs, HVF_KAPPA)
        passed = relative < tolerance
        logger.info('hvf %s/%s species %s: residual %.3e ratio %.6g %s', point.theory, kind, species, relative,
                    ratio.real, 'pass' if passed else 'FAIL')
        records.append({
            'theory': point.theory,
            'constraint': kind,
            'species': species,
            'kappa': HVF_KAPPA,
            'ratio': [ratio.real, ratio.imag],
            'residual_abs': residual,
            'residual_rel': relative,
            'directions': directions,
            'pass': bool(passed),
        })
    return records


def bracket_relations(theory):
    relations = ['LL', 'LP', 'PP', 'LH', 'PH', 'HH']
    if theory == 'ym':
        relations += ['MM', 'ML', 'MP', 'MH']
    return relations


RELATION_PARAMS = {
    'LL': ('c',), 'LP': ('c', 'xi'), 'PP': ('xi',), 'LH': ('c', 'lam'), 'PH': ('xi', 'lam'), 'HH': ('lam',),
    'MM': ('mu',), 'ML': ('mu', 'c'), 'MP': ('mu', 'xi'), 'MH': ('mu', 'lam'),
}


def bracket_kappa(relation):
    return SELF_BRACKET_KAPPA if relation[0] == relation[1] else CROSS_BRACKET_KAPPA


def relation_grade(relation):
    if relation in SPECTRAL_GRADE_RELATIONS:
        return GRADE_SPECTRAL
    if relation in EXACT_GRADE_RELATIONS:
        return GRADE_EXACT
    raise StructuralError('Unknown relation {}'.format(relation))


def relation_lhs(relation, point, params):
    F, G = relation[0], relation[1]
    return poisson_bracket((F, params), (G, params), point)


def relation_rhs(relation, point, params):
    """Right-hand side of a bracket relation, evaluated through eval_constraint."""
    theory = point.theory
    cov0 = point.reference_covariant()
    zero = GrassmannScalar()
    if relation == 'LL':
        return eval_constraint('L', point, GaugeParams(c=lie_bracket(params.c, params.c))) * -0.5
    if relation == 'LP':
        return eval_constraint('L', point, GaugeParams(c=cov0.lie_derivative(params.xi, params.c)))
    if relation == 'PP':
        xi = params.xi
        total = eval_constraint('P', point, GaugeParams(xi=vector_bracket(xi, xi, point.grid))) * 0.5
        F0 = cov0.curvature()
        total = total - eval_constraint('L', point, GaugeParams(c=iota_vector(xi, iota_vector(xi, F0)))) * 0.5
        if theory == 'ym':
            F_A0 = cov0.with_connection(omega=None, A=point.reference_A()).gauge_curvature()
            total = total - eval_constraint('M', point, GaugeParams(mu=iota_vector(xi, iota_vector(xi, F_A0)))) * 0.5
        return total
    if relation in ('LH', 'PH'):
        lam_en = wedge(params.lam, point.en())
        if relation == 'LH':
            Z = lie_bracket(params.c, lam_en)
            sign = -1.0
        else:
            Z = cov0.lie_derivative(params.xi, lam_en)
            sign = 1.0
        composite = composite_params(Z, point)
        total = (eval_constraint('P', point, composite) - eval_constraint('L', point, composite) +
                 eval_constraint('H', point, composite)) * sign
        if theory == 'ym':
            total = total - eval_constraint('M', point, composite) * sign
        return total
    if relation == 'MM':
        return eval_constraint('M', point, GaugeParams(mu=point.lie.bracket(params.mu, params.mu))) * -0.5
    if relation == 'MP':
        gauge0 = cov0.with_connection(omega=None, A=point.reference_A())
        return eval_constraint('M', point, GaugeParams(mu=gauge0.lie_derivative(params.xi, params.mu, 'lie')))
    return zero


def verify_relation(relation, point, params, tolerance=None):
    grade = relation_grade(relation)
    if tolerance is None:
        tolerance = DEFAULTS['tol_exact'] if grade == GRADE_EXACT else DEFAULTS['tol_spectral']
    lhs = relation_lhs(relation, point, params)
    rhs = relation_rhs(relation, point, params)
    kappa = bracket_kappa(relation)
    residual, relative, ratio = compare_fixed(lhs, rhs, kappa)
    passed = relative < tolerance
    logger.info('bracket %s/%s: residual %.3e ratio %.6g (%s) %s', point.theory, relation, relative, ratio.real,
                grade, 'pass' if passed else 'FAIL')
    return {
        'theory': point.theory,
        'relation': relation,
        'grade': grade,
        'kappa': kappa,
        'ratio': [ratio.real, ratio.imag],
        'residual_abs': residual,
        'residual_rel': relative,
        'lhs_max': lhs.max_abs(),
        'rhs_max': rhs.max_abs(),
        'resolution': point.grid.M,
        'seed': point.seed,
        'monomials': {k: v for k, v in (lhs - rhs * kappa).pruned(tolerance).as_dict().items()},
        'pass': bool(passed),
    }


def verify_bracket_table(theory, seed, resolution=None, K=None, budget=None, tolerances=None, point=None,
                         relations=None, **sampling):
    """Every relation of a theory's bracket table on one sampled configuration."""
    tolerances = tolerances or {}
    if point is None:
        grid = TorusGrid(DEFAULTS['grid'] if resolution is None else resolution)
        point = sample_config(theory, seed, K=K, grid=grid, **sampling)
    rng = np.random.default_rng([seed, 1])
    records = []
    for relation in relations or bracket_relations(theory):
        pool = GeneratorPool(point.generator_count)
        params = sample_params(point, rng, RELATION_PARAMS[relation], pool, budget=budget)
        grade = relation_grade(relation)
        records.append(verify_relation(relation, point, params, tolerance=tolerances.get(grade)))
    return records
