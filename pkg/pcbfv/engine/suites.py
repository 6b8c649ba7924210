#!/usr/bin/env python3

"""
Suites

Batch verification suites.  A suite id is either a fixed suite
('galg-identities', 'kernel-dims', ...) or a theory suite written
'<suite>:<theory>' ('brackets:scalar', 'cme:pc', 'hvf:ym').  Every suite
returns a list of check records with stable field names; run() collects
them into a RunReport.

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

import json
import logging
import multiprocessing as mp
import time

import numpy as np

from engine.bfv import appendix_ledger_ym, check_bfv_hvf, check_cme, constraint_kinds, ghost_names, sample_bfv_point
from engine.clifford import build_gamma, clifford_invariants
from engine.constant import (DEFAULTS, DERIVATIVE_IDENTITY_IDS, FIXED_SUITES, GRADE_EXACT, GRADE_SPECTRAL,
                             IDENTITY_IDS, PROGRAM_NAME, PROGRAM_VERSION, SUITE_REFERENCES, THEORIES,
                             THEORY_SUITES)
from engine.constraints import GeneratorPool, check_hvf, sample_params, verify_bracket_table
from engine.errors import ConfigError, DegeneracyError
from engine.fields import (LieAlgebra, TorusGrid, enforce_representative, sample_config, structural_residuals,
                           verify_convolution_backend, verify_derivative_identity)
from engine.framelin import (Coframe, KernelMap, decompose_B, decompose_omega, decompose_Pi, invert_kernel_map,
                             lightlike_frame, map_A_e, map_phi_e, presymplectic_kernel, unflatten,
                             verify_W_lemma)
from engine.galg import (FormSampler, InternalAlgebra, MixedForm, eta_pair, gamma_form, lie_bracket, magnitude,
                         power, verify_pointwise_identity, wedge)

logger = logging.getLogger(__name__)

BACKENDS = ('exact', 'grid')
FORMATS = ('json', 'md')

# deepest product of band-limited factors formed by each suite's integrands
PRODUCT_DEPTH = {
    'derivative-identities': 4,
    'brackets': 6,
    'cme': 8,
    'hvf': 6,
    'appendix-ledger': 8,
}

CLIFFORD_SPECTRAL_CHECKS = ('spin-lie-derivative',)

KERNEL_SHAPE_TOLERANCE = 1e-8


def parse_suite(suite_id):
    """'brackets:ym' -> ('brackets', 'ym'); fixed suites have theory None."""
    name, _, theory = suite_id.partition(':')
    if name in FIXED_SUITES:
        if theory:
            raise ConfigError('suite {} takes no theory'.format(name))
        return name, None
    if name in THEORY_SUITES:
        if theory not in THEORIES:
            raise ConfigError('suite {} needs a theory from {}, got "{}"'.format(name, ', '.join(THEORIES), theory))
        return name, theory
    raise ConfigError('Unknown suite {}'.format(suite_id))


class SuiteConfig:
    """Everything a run depends on; echoed into the report.

    Attributes
    ----------
    suites : list of str
    seed, K, grid, grassmann : int
    tolerances : dict
        grade or check family ('exact', 'spectral', 'hvf') -> tolerance.
    backend : str
        'exact' sizes every field grid for the deepest product of the
        suite; 'grid' uses the configured grid as is.
    """

    logger = None

    def __init__(self, suites, seed=None, K=None, grid=None, grassmann=None, tolerances=None, backend='grid',
                 output_format='json', samples=None, directions=None, workers=None, epsilon=None, lambda_cosmo=None,
                 reference_amplitude=None, lie_algebra=None, degeneracy=None, rank_rtol=None,
                 ledger_reference_amplitude=0.2):
        self.suites = list(suites or [])
        self.seed = DEFAULTS['seed'] if seed is None else seed
        self.K = DEFAULTS['K'] if K is None else K
        self.grid = DEFAULTS['grid'] if grid is None else grid
        self.grassmann = DEFAULTS['grassmann'] if grassmann is None else grassmann
        self.tolerances = {
            GRADE_EXACT: DEFAULTS['tol_exact'],
            GRADE_SPECTRAL: DEFAULTS['tol_spectral'],
            'hvf': DEFAULTS['tol_hvf'],
        }
        self.tolerances.update(tolerances or {})
        self.backend = backend
        self.output_format = output_format
        self.samples = DEFAULTS['identity_samples'] if samples is None else samples
        self.directions = DEFAULTS['directions'] if directions is None else directions
        self.workers = DEFAULTS['workers'] if workers is None else workers
        self.epsilon = DEFAULTS['epsilon'] if epsilon is None else epsilon
        self.lambda_cosmo = DEFAULTS['lambda_cosmo'] if lambda_cosmo is None else lambda_cosmo
        self.reference_amplitude = (DEFAULTS['reference_amplitude'] if reference_amplitude is None
                                    else reference_amplitude)
        self.lie_algebra = DEFAULTS['lie_algebra'] if lie_algebra is None else lie_algebra
        self.degeneracy = DEFAULTS['degeneracy'] if degeneracy is None else degeneracy
        self.rank_rtol = DEFAULTS['rank_rtol'] if rank_rtol is None else rank_rtol
        self.ledger_reference_amplitude = ledger_reference_amplitude

    def validate(self):
        if not self.suites:
            raise ConfigError('no suite selected')
        for suite_id in self.suites:
            parse_suite(suite_id)
        if self.backend not in BACKENDS:
            raise ConfigError('backend must be one of {}, got {}'.format(', '.join(BACKENDS), self.backend))
        if self.output_format not in FORMATS:
            raise ConfigError('format must be one of {}, got {}'.format(', '.join(FORMATS), self.output_format))
        if self.K < 0:
            raise ConfigError('K must be nonnegative, got {}'.format(self.K))
        if self.grassmann < 1:
            raise ConfigError('Grassmann budget must be positive, got {}'.format(self.grassmann))
        if self.samples < 1 or self.directions < 1 or self.workers < 1:
            raise ConfigError('samples, directions and workers must be positive')
        if self.grid < 2 * self.K + 1:
            raise ConfigError('grid {} cannot resolve bandwidth K={}: need at least {}'.format(
                self.grid, self.K, 2 * self.K + 1))
        for key, value in self.tolerances.items():
            if not value > 0:
                raise ConfigError('tolerance {} must be positive, got {}'.format(key, value))
        LieAlgebra.from_name(self.lie_algebra)
        return self

    def effective_grid(self, name):
        """Grid size used by a suite: the exact backend resolves the deepest product."""
        if self.backend != 'exact' or name not in PRODUCT_DEPTH:
            return self.grid
        needed = 2 * PRODUCT_DEPTH[name] * self.K + 1
        return max(self.grid, needed)

    def sampling(self):
        return {
            'epsilon': self.epsilon,
            'lambda_cosmo': self.lambda_cosmo,
            'reference_amplitude': self.reference_amplitude,
            'lie_name': self.lie_algebra,
            'threshold': self.degeneracy,
        }

    def as_dict(self):
        return {
            'suites': list(self.suites),
            'seed': self.seed,
            'K': self.K,
            'grid': self.grid,
            'grassmann': self.grassmann,
            'tolerances': dict(self.tolerances),
            'backend': self.backend,
            'format': self.output_format,
            'samples': self.samples,
            'directions': self.directions,
            'epsilon': self.epsilon,
            'lambda_cosmo': self.lambda_cosmo,
            'reference_amplitude': self.reference_amplitude,
            'lie_algebra': self.lie_algebra,
            'degeneracy': self.degeneracy,
            'rank_rtol': self.rank_rtol,
        }


def _record(suite_id, check, grade, residual, tolerance, passed, detail=None, **extra):
    name = suite_id.partition(':')[0]
    return {
        'suite': suite_id,
        'check': check,
        'grade': grade,
        'residual': float(residual),
        'tolerance': tolerance,
        'pass': bool(passed),
        'reference': SUITE_REFERENCES[name],
        'detail': dict(detail or {}, **extra),
    }


def _exact_verdict(residual, config):
    """Exact-backend residuals must vanish identically."""
    if config.backend == 'exact':
        return residual == 0, 0.0
    return residual < config.tolerances[GRADE_EXACT], config.tolerances[GRADE_EXACT]


"""
Pointwise suites
"""


def run_galg_identities(config, suite_id, theory=None):
    exact = config.backend == 'exact'
    records = []
    for name in IDENTITY_IDS:
        worst, witness = 0.0, None
        for k in range(config.samples):
            residual = magnitude(verify_pointwise_identity(name, config.seed + k, exact=exact))
            if residual > worst:
                worst, witness = residual, config.seed + k
        passed, tolerance = _exact_verdict(worst, config)
        records.append(_record(suite_id, name, GRADE_EXACT, worst, tolerance, passed, samples=config.samples,
                               worst_seed=witness))
    return records


def run_derivative_identities(config, suite_id, theory=None):
    grid = config.effective_grid('derivative-identities')
    tolerance = config.tolerances[GRADE_EXACT]
    records = []
    for name in DERIVATIVE_IDENTITY_IDS:
        residual = verify_derivative_identity(name, config.seed, K=max(config.K, 1), M=grid, reference=True)
        records.append(_record(suite_id, name, GRADE_EXACT, residual, tolerance, residual < tolerance,
                               resolution=grid))
    residual = verify_convolution_backend(config.seed, K=max(config.K, 1), M=grid)
    records.append(_record(suite_id, 'convolution-backend', GRADE_EXACT, residual, tolerance, residual < tolerance,
                           resolution=grid))
    return records


def run_clifford(config, suite_id, theory=None):
    worst = {}
    for k in range(config.samples):
        for check, residual in clifford_invariants(config.seed + k).items():
            worst[check] = max(worst.get(check, 0.0), magnitude(residual))
    records = []
    for check, residual in worst.items():
        if check in CLIFFORD_SPECTRAL_CHECKS:
            tolerance = config.tolerances[GRADE_SPECTRAL]
            records.append(_record(suite_id, check, GRADE_SPECTRAL, residual, tolerance, residual < tolerance,
                                   samples=config.samples))
        else:
            records.append(_record(suite_id, check, GRADE_EXACT, residual, 0.0, residual == 0,
                                   samples=config.samples))
    return records


def sample_frames(config, count, offset=0):
    """Batch of random nondegenerate boundary coframes with completing normals."""
    rng = np.random.default_rng([config.seed, offset])
    sampler = FormSampler(rng, exact=False)
    algebra = InternalAlgebra(4, form_dim=3)
    frames, normals = [], []
    for _ in range(count):
        frame, normal = sampler.boundary_frame(algebra)
        frames.append(frame)
        normals.append(normal)
    coframe = Coframe(np.stack(frames), np.stack(normals), threshold=config.degeneracy, algebra=algebra)
    coframe.check()
    return coframe, rng


def _random_form(rng, coframe, i, j, extra=(1, 1), complex_values=False):
    alg = coframe.algebra
    shape = coframe.batch + (alg.form_size(i), alg.internal_size(j)) + tuple(extra)
    array = rng.standard_normal(shape)
    if complex_values:
        array = array + 1j * rng.standard_normal(shape)
    return MixedForm(alg, i, j, {0: array}, bandwidth=None)


def run_framelin_lemmas(config, suite_id, theory=None):
    coframe, rng = sample_frames(config, config.samples, 1)
    records = []
    for report in verify_W_lemma(coframe, config.rank_rtol):
        detail = report.as_dict()
        detail.pop('passed')
        records.append(_record(suite_id, report.map_id, GRADE_EXACT, 0.0 if report.passed else 1.0, 0.0,
                               report.passed, detail, frames=config.samples))
    tolerance = 1e-12
    alg = coframe.algebra
    e = coframe.e()
    target = _random_form(rng, coframe, 1, 0)
    p = invert_kernel_map(KernelMap.A_e(coframe, config.rank_rtol), target, alg, 1)
    residual = max((map_A_e(coframe, p) - target).max_abs(), wedge(power(e, 3), p).max_abs())
    records.append(_record(suite_id, 'A_e round trip', GRADE_EXACT, residual, tolerance, residual < tolerance))
    target = _random_form(rng, coframe, 2, 0)
    b = invert_kernel_map(KernelMap.phi_e(coframe, config.rank_rtol), target, alg, 2)
    residual = max((map_phi_e(coframe, b) - target).max_abs(), wedge(power(e, 2), b).max_abs())
    records.append(_record(suite_id, 'phi_e round trip', GRADE_EXACT, residual, tolerance, residual < tolerance))
    try:
        lightlike = lightlike_frame()
        lightlike.check()
        KernelMap.A_e(lightlike, config.rank_rtol)
        raised, message = False, None
    except DegeneracyError as err:
        raised, message = True, str(err)
    records.append(_record(suite_id, 'lightlike frame rejected', GRADE_EXACT, 0.0 if raised else 1.0, 0.0, raised,
                           error=message))
    return records


def _decomposition_omega(coframe, rng, rtol):
    e, en = coframe.e(), coframe.en()
    kernel = coframe.kernel(1, 1, 2, rtol)
    T = _random_form(rng, coframe, 2, 2)
    sigma, v = decompose_omega(coframe, T, rtol)
    rebuilt = wedge(e, sigma) + wedge(en, lie_bracket(v, e))
    constraint = max((rebuilt - T).max_abs(), wedge(e, v).max_abs())
    sigma_again, v_again = decompose_omega(coframe, rebuilt, rtol)
    idempotence = max((sigma_again - sigma).max_abs(), (v_again - v).max_abs())
    sigma0 = _random_form(rng, coframe, 1, 1)
    coefficients = rng.standard_normal(coframe.batch + (kernel.shape[-1],))
    v_array = np.einsum('...nk,...k->...n', kernel, coefficients)
    v0 = unflatten({0: v_array}, coframe.algebra, 1, 2)
    sigma1, v1 = decompose_omega(coframe, wedge(e, sigma0) + wedge(en, lie_bracket(v0, e)), rtol)
    recovery = max((sigma1 - sigma0).max_abs(), (v1 - v0).max_abs())
    return constraint, idempotence, recovery


def _decomposition_Pi(coframe, rng, rtol):
    e = coframe.e()
    Pi_tilde = _random_form(rng, coframe, 0, 1)
    dphi = _random_form(rng, coframe, 1, 0)
    Pi, p = decompose_Pi(coframe, Pi_tilde, dphi, rtol)
    constraint = max((eta_pair(e, Pi) + dphi).max_abs(), wedge(power(e, 3), p).max_abs())
    _, p_again = decompose_Pi(coframe, Pi, dphi, rtol)
    p0 = p.scale(-0.5)
    Pi1, p1 = decompose_Pi(coframe, Pi + p0, dphi, rtol)
    return constraint, p_again.max_abs(), max((Pi1 - Pi).max_abs(), (p1 - p0).max_abs())


def _decomposition_B(coframe, rng, rtol):
    e2 = power(coframe.e(), 2)
    B_tilde = _random_form(rng, coframe, 0, 2)
    F_A = _random_form(rng, coframe, 2, 0)
    B, b = decompose_B(coframe, B_tilde, F_A, rtol)
    constraint = max((F_A + eta_pair(e2, B).scale(0.5)).max_abs(), wedge(e2, b).max_abs())
    _, b_again = decompose_B(coframe, B, F_A, rtol)
    b0 = b.scale(2.0)
    B1, b1 = decompose_B(coframe, B + b0, F_A, rtol)
    return constraint, b_again.max_abs(), max((B1 - B).max_abs(), (b1 - b0).max_abs())


def run_decompositions(config, suite_id, theory=None):
    coframe, rng = sample_frames(config, config.samples, 2)
    limits = {'constraint': 1e-10, 'idempotence': 1e-12, 'recovery': 1e-10}
    records = []
    for name, solve in (('omega', _decomposition_omega), ('Pi', _decomposition_Pi), ('B', _decomposition_B)):
        values = dict(zip(('constraint', 'idempotence', 'recovery'), solve(coframe, rng, config.rank_rtol)))
        for kind, value in values.items():
            records.append(_record(suite_id, '{} {}'.format(name, kind), GRADE_EXACT, value, limits[kind],
                                   value < limits[kind], frames=config.samples))
    # the spinor source is quadratic in the spinors; checked on sampled configurations
    grid = TorusGrid(config.effective_grid('decompositions'))
    worst = {'constraint': 0.0, 'idempotence': 0.0}
    count = max(1, config.samples // 25)
    for k in range(count):
        point = sample_config('spinor', config.seed + k, K=config.K, grid=grid, **config.sampling())
        worst['constraint'] = max(worst['constraint'], structural_residuals(point, config.rank_rtol)['omega'])
        again = enforce_representative(point, config.rank_rtol)
        worst['idempotence'] = max(worst['idempotence'],
                                   (again.field('omega') - point.field('omega')).max_abs())
    for kind, value in worst.items():
        records.append(_record(suite_id, 'spinor omega {}'.format(kind), GRADE_EXACT, value, limits[kind],
                               value < limits[kind], configurations=count, resolution=grid.M))
    return records


def kernel_matter(theory, coframe, rng, lie):
    alg = coframe.algebra
    if theory == 'scalar':
        return {'Pi': _random_form(rng, coframe, 0, 1)}
    if theory == 'ym':
        return {'B': _random_form(rng, coframe, 0, 2, extra=(lie.dim, 1)), 'lie': lie}
    if theory == 'spinor':
        gammas = build_gamma(4, alg.eta, exact=False).gammas
        return {'psi': _random_form(rng, coframe, 0, 0, extra=(4, 1), complex_values=True),
                'psibar': _random_form(rng, coframe, 0, 0, extra=(1, 4), complex_values=True),
                'gamma': gamma_form(alg, gammas)}
    return {}


def run_kernel_dims(config, suite_id, theory=None):
    coframe, rng = sample_frames(config, config.samples, 3)
    lie = LieAlgebra.from_name(config.lie_algebra)
    records = []
    for name in THEORIES:
        report, shape = presymplectic_kernel(name, coframe, kernel_matter(name, coframe, rng, lie),
                                             config.rank_rtol)
        worst = max(shape.values(), default=0.0)
        passed = report.passed and worst < KERNEL_SHAPE_TOLERANCE
        records.append(_record(suite_id, 'kernel {}'.format(name), GRADE_EXACT, worst, KERNEL_SHAPE_TOLERANCE,
                               passed, kernel_dim=report.kernel_dim, expected_kernel=report.expected_kernel,
                               rank_min=report.rank, rank_max=report.rank_max, frames=config.samples,
                               shape_residuals=shape))
    return records


"""
Field suites
"""


def run_brackets(config, suite_id, theory, point=None):
    seed = config.seed if point is None else point.seed
    table = verify_bracket_table(theory, seed, resolution=config.effective_grid('brackets'), K=config.K,
                                 budget=config.grassmann, tolerances=config.tolerances, point=point,
                                 **config.sampling())
    return [_record(suite_id, r['relation'], r['grade'], r['residual_rel'],
                    config.tolerances[r['grade']], r['pass'], r) for r in table]


def run_cme(config, suite_id, theory, point=None):
    seed = config.seed if point is None else point.seed
    bp = None if point is None else sample_bfv_point(theory, seed, point=point, budget=config.grassmann)
    result = check_cme(theory, seed, resolution=config.effective_grid('cme'), K=config.K, budget=config.grassmann,
                       tolerance=config.tolerances[GRADE_SPECTRAL], bp=bp, **config.sampling())
    return [_record(suite_id, 'master equation', result['grade'], result['residual_rel'],
                    config.tolerances[GRADE_SPECTRAL], result['pass'], result)]


def run_hvf(config, suite_id, theory, point=None):
    tolerance = config.tolerances['hvf']
    if point is None:
        grid = TorusGrid(config.effective_grid('hvf'))
        point = sample_config(theory, config.seed, K=config.K, grid=grid, **config.sampling())
    rng = np.random.default_rng([point.seed, 3])
    pool = GeneratorPool(point.generator_count)
    params = sample_params(point, rng, ghost_names(theory), pool, budget=config.grassmann)
    records = []
    for kind in constraint_kinds(theory):
        for r in check_hvf(kind, point, params, rng, pool, directions=config.directions, tolerance=tolerance):
            records.append(_record(suite_id, '{} {}'.format(kind, r['species']), GRADE_SPECTRAL, r['residual_rel'],
                                   tolerance, r['pass'], r))
    bp = sample_bfv_point(theory, point.seed, point=point, budget=config.grassmann)
    for r in check_bfv_hvf(theory, bp, rng, directions=config.directions, tolerance=tolerance):
        records.append(_record(suite_id, 'S {}'.format(r['species']), GRADE_SPECTRAL, r['residual_rel'],
                               tolerance, r['pass'], r))
    return records


def run_appendix_ledger(config, suite_id, theory=None):
    grid = config.effective_grid('appendix-ledger')
    sampling = config.sampling()
    sampling['reference_amplitude'] = config.ledger_reference_amplitude
    ledger = appendix_ledger_ym(config.seed, resolution=grid, K=config.K, budget=config.grassmann,
                                tolerances=config.tolerances, **sampling)
    records = [_record(suite_id, 'group {}'.format(g['group']), g['grade'], g['residual_rel'],
                       config.tolerances[g['grade']], g['pass'], g) for g in ledger['groups']]
    covered = ledger['coverage']['terms'] == ledger['coverage']['assigned']
    records.append(_record(suite_id, 'coverage', GRADE_EXACT, 0.0 if covered else 1.0, 0.0, covered,
                           ledger['coverage'], ledger_terms=ledger['terms']))
    return records


SUITE_RUNNERS = {
    'galg-identities': run_galg_identities,
    'derivative-identities': run_derivative_identities,
    'clifford': run_clifford,
    'framelin-lemmas': run_framelin_lemmas,
    'decompositions': run_decompositions,
    'kernel-dims': run_kernel_dims,
    'appendix-ledger': run_appendix_ledger,
    'brackets': run_brackets,
    'cme': run_cme,
    'hvf': run_hvf,
}


def run_suite(config, suite_id):
    name, theory = parse_suite(suite_id)
    start = time.time()
    records = SUITE_RUNNERS[name](config, suite_id, theory)
    elapsed = time.time() - start
    failed = sum(1 for r in records if not r['pass'])
    logger.info('suite %s: %d checks, %d failed, %.1f s', suite_id, len(records), failed, elapsed)
    if SuiteConfig.logger is not None:
        SuiteConfig.logger.info('suite %s done in %.1f s, %d of %d checks failed', suite_id, elapsed, failed,
                                len(records))
    return records, elapsed


def _run_suite_job(job):
    return run_suite(*job)


"""
Reports
"""


class RunReport:
    """Config echo, per-check records and verdict of one run.

    Timing lives in its own field so report bodies of identical runs
    compare byte for byte once it is dropped.
    """

    def __init__(self, config, records, timing=None):
        self.config = config
        self.records = list(records)
        self.timing = dict(timing or {})

    @property
    def passed(self):
        return all(r['pass'] for r in self.records)

    def body(self):
        return {
            'program': PROGRAM_NAME,
            'version': PROGRAM_VERSION,
            'config': self.config.as_dict(),
            'records': self.records,
            'checks': len(self.records),
            'failed': sum(1 for r in self.records if not r['pass']),
            'pass': self.passed,
        }

    def as_dict(self):
        out = self.body()
        out['timing'] = self.timing
        return out

    def to_json(self, timing=True):
        return json.dumps(self.as_dict() if timing else self.body(), sort_keys=True, indent=2,
                          default=_json_default)

    def to_markdown(self):
        body = self.body()
        lines = ['# {} {} report'.format(PROGRAM_NAME, PROGRAM_VERSION), '',
                 'Verdict: **{}** ({} checks, {} failed)'.format('PASS' if body['pass'] else 'FAIL',
                                                                 body['checks'], body['failed']), '',
                 '| suite | check | grade | residual | tolerance | result |',
                 '|---|---|---|---|---|---|']
        for r in self.records:
            lines.append('| {} | {} | {} | {:.3e} | {:.1e} | {} |'.format(
                r['suite'], r['check'], r['grade'], r['residual'], r['tolerance'], 'pass' if r['pass'] else 'FAIL'))
        lines.append('')
        lines.append('Seed {seed}, K {K}, grid {grid}, Grassmann budget {grassmann}, backend {backend}.'.format(
            **body['config']))
        if self.timing:
            lines.append('Wall time {:.1f} s.'.format(self.timing.get('total', 0.0)))
        return '\n'.join(lines) + '\n'

    def render(self, output_format=None):
        output_format = output_format or self.config.output_format
        return self.to_markdown() if output_format == 'md' else self.to_json()


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError('not serializable: {}'.format(type(value).__name__))


def run(config):
    """Run every selected suite; records come back in suite order whatever the worker count."""
    config.validate()
    start = time.time()
    jobs = [(config, suite_id) for suite_id in config.suites]
    if config.workers > 1 and len(jobs) > 1:
        with mp.Pool(min(config.workers, len(jobs))) as pool:
            results = pool.map(_run_suite_job, jobs)
    else:
        results = [_run_suite_job(job) for job in jobs]
    records = [r for suite_records, _ in results for r in suite_records]
    timing = {suite_id: elapsed for suite_id, (_, elapsed) in zip(config.suites, results)}
    timing['total'] = time.time() - start
    return RunReport(config, records, timing)


REPLAY_RUNNERS = {
    'brackets': run_brackets,
    'cme': run_cme,
    'hvf': run_hvf,
}


def replay(config, point, check):
    """Rerun one theory suite, or one check of it, on a reloaded configuration.

    check is '<suite>' or '<suite>:<check>', e.g. 'brackets:LH' or
    'hvf:H omega'.  The seed stored with the point drives every random
    draw, so residuals match the run that wrote the dump.
    """
    name, _, wanted = check.partition(':')
    if name not in REPLAY_RUNNERS:
        raise ConfigError('cannot replay {}: choose one of {}'.format(check, ', '.join(REPLAY_RUNNERS)))
    suite_id = '{}:{}'.format(name, point.theory)
    start = time.time()
    records = REPLAY_RUNNERS[name](config, suite_id, point.theory, point=point)
    if wanted:
        records = [r for r in records if r['check'] == wanted]
        if not records:
            raise ConfigError('suite {} has no check {}'.format(suite_id, wanted))
    timing = {'replay': time.time() - start}
    logger.info('replay %s on %r: %d checks', check, point, len(records))
    return RunReport(config, records, timing)
