#!/usr/bin/env python3

"""Verification engine for the boundary structure of Palatini-Cartan gravity.

This script runs the verification suites: pointwise identities of the
mixed-form calculus, Clifford and spin invariants, coframe linear algebra
lemmas, the structural decompositions, presymplectic kernels, the
first-class constraint brackets, Hamiltonian vector fields and the BFV
classical master equation for the pure, scalar, Yang-Mills and spinor
theories.  It also writes and replays binary dumps of sampled
configurations.

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

import os
import sys
import argparse
from pathlib import Path
import logging
import multiprocessing as mp

from engine.config_read import ConfigRead
from engine.constant import (CONFIG_FILE_NAME, DEFAULTS, EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_DEGENERACY,
                             EXIT_PASS, LOG_FILE_NAME, PROGRAM_NAME, PROGRAM_VERSION, THEORIES)
from engine.dump import read_dump, write_dump
from engine.errors import AliasingError, ConfigError, DegeneracyError, DumpError, PcbfvError, SamplerError
from engine.fields import TorusGrid, sample_config
from engine.suites import FORMATS, BACKENDS, SuiteConfig, replay, run

COMMANDS = ('run', 'replay', 'sample')

THREADS_VARIABLE = 'PCBFV_THREADS'


"""
Configuration
"""


def read_settings(config):
    """Defaults overlaid with the configuration file; the command line goes on top."""
    get = config.get_param
    settings = {
        'debug': get('pcbfv', 'debug', 'bool', False),
        'log_file': get('pcbfv', 'log_file', 'path', LOG_FILE_NAME),
        'workers': get('pcbfv', 'workers', 'int', DEFAULTS['workers']),
        'seed': get('sampling', 'seed', 'int', DEFAULTS['seed']),
        'K': get('sampling', 'K', 'int', DEFAULTS['K']),
        'epsilon': get('sampling', 'epsilon', 'float', DEFAULTS['epsilon']),
        'grid': get('sampling', 'grid', 'int', DEFAULTS['grid']),
        'grassmann': get('sampling', 'grassmann', 'int', DEFAULTS['grassmann']),
        'lambda_cosmo': get('sampling', 'lambda_cosmo', 'float', DEFAULTS['lambda_cosmo']),
        'reference_amplitude': get('sampling', 'reference_amplitude', 'float', DEFAULTS['reference_amplitude']),
        'lie_algebra': get('sampling', 'lie_algebra', 'string', DEFAULTS['lie_algebra']),
        'samples': get('sampling', 'samples', 'int', DEFAULTS['identity_samples']),
        'directions': get('sampling', 'directions', 'int', DEFAULTS['directions']),
        'tol_exact': get('tolerances', 'exact', 'float', DEFAULTS['tol_exact']),
        'tol_spectral': get('tolerances', 'spectral', 'float', DEFAULTS['tol_spectral']),
        'tol_hvf': get('tolerances', 'hvf', 'float', DEFAULTS['tol_hvf']),
        'rank_rtol': get('tolerances', 'rank_rtol', 'float', DEFAULTS['rank_rtol']),
        'degeneracy': get('tolerances', 'degeneracy', 'float', DEFAULTS['degeneracy']),
    }
    threads = os.environ.get(THREADS_VARIABLE)
    if threads:
        try:
            settings['workers'] = int(threads)
        except ValueError:
            raise ConfigError('{} must be an integer, got {}'.format(THREADS_VARIABLE, threads))
    return settings


def build_parser():
    parser = argparse.ArgumentParser(prog=PROGRAM_NAME, description='Boundary structure verification suites.')
    commands = parser.add_subparsers(dest='command')

    def sampling_flags(p):
        p.add_argument('--seed', type=int)
        p.add_argument('--K', type=int, help='trigonometric bandwidth of sampled fields')
        p.add_argument('--grid', type=int, help='grid points per torus direction')
        p.add_argument('--grassmann', type=int, help='Grassmann generators per odd parameter')
        p.add_argument('--debug', action='store_true', default=None)

    def report_flags(p):
        p.add_argument('--tol.exact', dest='tol_exact', type=float)
        p.add_argument('--tol.spectral', dest='tol_spectral', type=float)
        p.add_argument('--tol.hvf', dest='tol_hvf', type=float)
        p.add_argument('--directions', type=int)
        p.add_argument('--report', help='write the report here instead of standard output')
        p.add_argument('--format', dest='output_format', choices=FORMATS, default='json')

    run_parser = commands.add_parser('run', help='run verification suites (default)')
    run_parser.add_argument('--suite', action='append', default=[],
                            help='suite id, e.g. galg-identities or brackets:scalar (repeatable)')
    run_parser.add_argument('--backend', choices=BACKENDS, default='grid')
    run_parser.add_argument('--samples', type=int, help='random samples per pointwise check')
    sampling_flags(run_parser)
    report_flags(run_parser)

    replay_parser = commands.add_parser('replay', help='rerun one check on a dumped configuration')
    replay_parser.add_argument('dump')
    replay_parser.add_argument('check', help="'brackets', 'cme' or 'hvf', optionally ':<check name>'")
    replay_parser.add_argument('--grassmann', type=int)
    replay_parser.add_argument('--debug', action='store_true', default=None)
    report_flags(replay_parser)

    sample_parser = commands.add_parser('sample', help='sample a configuration and write a dump')
    sample_parser.add_argument('theory', choices=THEORIES)
    sample_parser.add_argument('out')
    sampling_flags(sample_parser)
    return parser


def parse_args(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMMANDS + ('-h', '--help'):
        argv.insert(0, 'run')
    return build_parser().parse_args(argv)


def merge(settings, args):
    for key, value in vars(args).items():
        if value is not None and key in settings:
            settings[key] = value
    return settings


def suite_config(settings, suites, backend='grid', output_format='json'):
    return SuiteConfig(suites, seed=settings['seed'], K=settings['K'], grid=settings['grid'],
                       grassmann=settings['grassmann'],
                       tolerances={'exact': settings['tol_exact'], 'spectral': settings['tol_spectral'],
                                   'hvf': settings['tol_hvf']},
                       backend=backend, output_format=output_format, samples=settings['samples'],
                       directions=settings['directions'], workers=settings['workers'], epsilon=settings['epsilon'],
                       lambda_cosmo=settings['lambda_cosmo'], reference_amplitude=settings['reference_amplitude'],
                       lie_algebra=settings['lie_algebra'], degeneracy=settings['degeneracy'],
                       rank_rtol=settings['rank_rtol'])


"""
Commands
"""


def emit(report, output_format, path):
    text = report.to_markdown() if output_format == 'md' else report.to_json() + '\n'
    if path:
        with open(path, 'w') as f:
            f.write(text)
        logging.info('report written to %s', path)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILURE


def do_run(settings, args):
    config = suite_config(settings, args.suite, args.backend, args.output_format).validate()
    report = run(config)
    logging.info('run finished: %d checks, %s', len(report.records), 'pass' if report.passed else 'FAIL')
    return emit(report, args.output_format, args.report)


def do_replay(settings, args):
    point = read_dump(args.dump)
    settings.update({'seed': point.seed, 'K': point.K, 'grid': point.grid.M})
    name = args.check.partition(':')[0]
    config = suite_config(settings, ['{}:{}'.format(name, point.theory)], output_format=args.output_format)
    config.validate()
    report = replay(config, point, args.check)
    return emit(report, args.output_format, args.report)


def do_sample(settings, args):
    point = sample_config(args.theory, settings['seed'], K=settings['K'], grid=TorusGrid(settings['grid']),
                          epsilon=settings['epsilon'], lambda_cosmo=settings['lambda_cosmo'],
                          reference_amplitude=settings['reference_amplitude'], lie_name=settings['lie_algebra'],
                          threshold=settings['degeneracy'])
    write_dump(point, args.out)
    print('{} written to {}'.format(point, args.out))
    return EXIT_PASS


COMMAND_HANDLERS = {
    'run': do_run,
    'replay': do_replay,
    'sample': do_sample,
}


"""
Main
"""


def main(argv=None):
    program_name = PROGRAM_NAME
    program_version = PROGRAM_VERSION

    args = parse_args(argv)

    home_folder_name = str(Path.home())
    script_folder_name = os.path.dirname(os.path.realpath(__file__))
    config = ConfigRead()
    config_found = config.open_config([home_folder_name, script_folder_name], CONFIG_FILE_NAME)
    try:
        settings = merge(read_settings(config), args)
    except ConfigError as err:
        print('{}: {}'.format(program_name, err), file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if settings['debug']:
        logging.basicConfig(filename=settings['log_file'], level=logging.DEBUG, format='%(asctime)s %(message)s')
    else:
        logging.basicConfig(filename=settings['log_file'], level=logging.INFO, format='%(asctime)s %(message)s')
    logging.info('%s %s: Run started', program_name, program_version)
    if not config_found:
        logging.info('Unable to find configuration file %s; using defaults', CONFIG_FILE_NAME)
    logger = mp.log_to_stderr()
    logger.setLevel(logging.INFO)
    SuiteConfig.logger = logger

    try:
        return COMMAND_HANDLERS[args.command](settings, args)
    except (ConfigError, AliasingError, DumpError) as err:
        logging.error('%s', err)
        print('{}: {}'.format(program_name, err), file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (DegeneracyError, SamplerError) as err:
        logging.error('degenerate configuration: %s (point %s)', err, getattr(err, 'point', None))
        print('{}: {}'.format(program_name, err), file=sys.stderr)
        return EXIT_DEGENERACY
    except PcbfvError as err:
        logging.error('%s', err)
        print('{}: {}'.format(program_name, err), file=sys.stderr)
        return EXIT_CHECK_FAILURE


if __name__ == "__main__":
    # execute only if run as a script
    sys.exit(main())
