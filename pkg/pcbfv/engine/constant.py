#!/usr/bin/env python3

"""
Constants

Catalog identifiers, suite identifiers, exit codes and run defaults.
Identifiers are part of the report format.  DO NOT RENAME!

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

PROGRAM_NAME = 'pcbfv'
PROGRAM_VERSION = 'V1.0'
DUMP_FORMAT_VERSION = 1

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_DEGENERACY = 3

THEORIES = ('pc', 'scalar', 'ym', 'spinor')

IDENTITY_IDS = (
    'bulk-1',
    'bulk-2',
    'corollary-1',
    'corollary-2',
    'boundary-★-1',
    'boundary-★-2',
    '▼',
)

DERIVATIVE_IDENTITY_IDS = ('♠', '♣', '♥', '▲', '◆')

FIXED_SUITES = (
    'galg-identities',
    'derivative-identities',
    'clifford',
    'framelin-lemmas',
    'decompositions',
    'kernel-dims',
    'appendix-ledger',
)

THEORY_SUITES = ('brackets', 'cme', 'hvf')

# Traceability entries carried into every report record
SUITE_REFERENCES = {
    'galg-identities': 'bulk internal-product lemma items 1-2, its corollary, boundary star identities, gamma contraction identity',
    'derivative-identities': 'Lie derivative identities used in the P/P and P/H brackets, Bianchi identity',
    'clifford': 'Clifford relations, adjoint relation, covering map, spin Lie algebra isomorphism, d_omega gamma = 0',
    'framelin-lemmas': 'boundary W_k lemma items 1-5 and 7, bulk W lemma, rho_n bijectivity, A_e and phi_e lemmas',
    'decompositions': 'connection decomposition, scalar momentum fixing, Yang-Mills B fixing, spinor-corrected decomposition',
    'kernel-dims': 'presymplectic kernel systems of the PC, scalar, Yang-Mills and spinor boundary two-forms',
    'brackets': 'first-class constraint bracket tables',
    'cme': 'BFV classical master equation {S,S}=0',
    'hvf': 'Hamiltonian vector field defining relation',
    'appendix-ledger': 'itemized cancellation of the Yang-Mills BFV master equation',
}

GRADE_EXACT = 'exact'
GRADE_SPECTRAL = 'spectral'

# Relations whose right-hand side avoids frame components
EXACT_GRADE_RELATIONS = ('LL', 'LP', 'PP', 'MM', 'ML', 'MP', 'MH', 'HH')
SPECTRAL_GRADE_RELATIONS = ('LH', 'PH')

DEFAULTS = {
    'seed': 7,
    'K': 1,
    'epsilon': 0.2,
    'grid': 16,
    'grassmann': 2,
    'spinor_grassmann': 4,
    'lambda_cosmo': 0.3,
    'reference_amplitude': 0.0,
    'tol_exact': 1e-10,
    'tol_spectral': 1e-6,
    'tol_hvf': 1e-8,
    'tol_solver': 1e-10,
    'rank_rtol': 1e-8,
    'degeneracy': 1e-6,
    'identity_samples': 100,
    'frame_samples': 100,
    'directions': 10,
    'resample_budget': 100,
    'workers': 1,
    'lie_algebra': 'su2',
}

CONFIG_FILE_NAME = '.pcbfv'
LOG_FILE_NAME = 'pcbfv.log'
