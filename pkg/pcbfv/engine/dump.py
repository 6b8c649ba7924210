#!/usr/bin/env python3

"""
Dump

Binary dumps of a PhaseSpacePoint, so a failing configuration can be
reloaded and a single check replayed.

Layout (little endian):

    'PCBF' | format version | body length | body | SHA-256(body)

The body holds a header (theory, seed, K, grid, generator count, Lambda,
degeneracy threshold, Lie algebra name, normal vector, generator blocks)
followed by one block per Grassmann component of every stored field and
reference connection.

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

import hashlib
import logging

import numpy as np
from construct import (Array, Bytes, Const, ConstructError, Enum, Flag, Float64l, GreedyBytes, Int8sl, Int8ul,
                       Int16sl, Int16ul, Int32ul, Int64sl, Int64ul, PascalString, Prefixed, PrefixedArray, Struct,
                       this)

from engine.clifford import build_gamma
from engine.constant import DUMP_FORMAT_VERSION
from engine.errors import ChecksumError, DumpError
from engine.fields import LieAlgebra, PhaseSpacePoint, TorusGrid
from engine.galg import InternalAlgebra, MixedForm

logger = logging.getLogger(__name__)

MAGIC = b'PCBF'
DIGEST_SIZE = 32

Name = PascalString(Int8ul, 'utf8')

GeneratorBlock = Struct(
    'name' / Name,
    'indices' / PrefixedArray(Int8ul, Int16ul),
)

Header = Struct(
    'theory' / Name,
    'seed' / Int64sl,
    'K' / Int16ul,
    'grid' / Int32ul,
    'generator_count' / Int16ul,
    'Lambda' / Float64l,
    'threshold' / Float64l,
    'lie' / Name,
    'N' / Int8ul,
    'normal' / Array(this.N, Float64l),
    'generators' / PrefixedArray(Int8ul, GeneratorBlock),
)

FieldBlock = Struct(
    'role' / Enum(Int8ul, field=0, omega0=1, A0=2),
    'name' / Name,
    'i' / Int8ul,
    'j' / Int8ul,
    'ghost' / Int8sl,
    'bandwidth' / Int16sl,
    'mask' / Int64ul,
    'complex' / Flag,
    'shape' / PrefixedArray(Int8ul, Int32ul),
    'payload' / Prefixed(Int64ul, GreedyBytes),
)

Body = Struct(
    'header' / Header,
    'blocks' / PrefixedArray(Int32ul, FieldBlock),
)

Envelope = Struct(
    'magic' / Const(MAGIC),
    'version' / Int16ul,
    'body' / Prefixed(Int64ul, GreedyBytes),
    'checksum' / Bytes(DIGEST_SIZE),
)


def _blocks(role, name, form):
    if form.exact:
        raise DumpError('field {} has exact coefficients; only float dumps are supported'.format(name))
    for mask, array in sorted(form.comps.items()):
        is_complex = np.iscomplexobj(array)
        payload = np.ascontiguousarray(array, dtype='<c16' if is_complex else '<f8')
        yield {
            'role': role,
            'name': name,
            'i': form.i,
            'j': form.j,
            'ghost': form.ghost,
            'bandwidth': -1 if form.bandwidth is None else form.bandwidth,
            'mask': mask,
            'complex': is_complex,
            'shape': list(payload.shape),
            'payload': payload.tobytes(),
        }


def dump_point(point):
    """Serialize a PhaseSpacePoint to bytes."""
    header = {
        'theory': point.theory,
        'seed': -1 if point.seed is None else int(point.seed),
        'K': point.K,
        'grid': point.grid.M,
        'generator_count': point.generator_count,
        'Lambda': float(point.Lambda),
        'threshold': float(point.threshold),
        'lie': point.lie.name if point.lie is not None else '',
        'N': point.algebra.N,
        'normal': [float(v) for v in point.normal],
        'generators': [{'name': k, 'indices': list(v)} for k, v in sorted(point.generators.items())],
    }
    blocks = []
    for name, form in sorted(point.fields.items()):
        blocks.extend(_blocks('field', name, form))
    if point.omega0 is not None:
        blocks.extend(_blocks('omega0', 'omega0', point.omega0))
    if point.A0 is not None:
        blocks.extend(_blocks('A0', 'A0', point.A0))
    body = Body.build({'header': header, 'blocks': blocks})
    logger.debug('dump %r: %d blocks, %d bytes', point, len(blocks), len(body))
    return Envelope.build({'version': DUMP_FORMAT_VERSION, 'body': body,
                           'checksum': hashlib.sha256(body).digest()})


def parse_dump(data):
    """Check magic, version and checksum; return the parsed body container."""
    try:
        envelope = Envelope.parse(data)
    except ConstructError as err:
        raise DumpError('not a {} dump: {}'.format(MAGIC.decode(), err))
    if envelope.version != DUMP_FORMAT_VERSION:
        raise DumpError('dump format version {} is not supported (expected {})'.format(
            envelope.version, DUMP_FORMAT_VERSION))
    if hashlib.sha256(envelope.body).digest() != envelope.checksum:
        raise ChecksumError('dump body does not match its SHA-256 checksum')
    try:
        return Body.parse(envelope.body)
    except ConstructError as err:
        raise DumpError('malformed dump body: {}'.format(err))


def block_array(block):
    dtype = '<c16' if block.complex else '<f8'
    return np.frombuffer(block.payload, dtype=dtype).reshape(tuple(block.shape)).astype(
        complex if block.complex else float)


def load_point(data):
    """Rebuild the PhaseSpacePoint stored by dump_point."""
    body = parse_dump(data)
    header = body.header
    algebra = InternalAlgebra(header.N, form_dim=3)
    forms = {}
    for block in body.blocks:
        key = (str(block.role), block.name)
        if key not in forms:
            forms[key] = MixedForm(algebra, block.i, block.j, {}, ghost=block.ghost,
                                   bandwidth=None if block.bandwidth < 0 else block.bandwidth)
        forms[key].comps[block.mask] = block_array(block)
    fields = {name: form for (role, name), form in forms.items() if role == 'field'}
    lie = LieAlgebra.from_name(header.lie) if header.lie else None
    gamma = build_gamma(header.N, algebra.eta, exact=False) if header.theory == 'spinor' else None
    point = PhaseSpacePoint(header.theory, TorusGrid(header.grid), algebra, fields, np.array(header.normal),
                            omega0=forms.get(('omega0', 'omega0')), A0=forms.get(('A0', 'A0')),
                            Lambda=header.Lambda, lie=lie, gamma=gamma,
                            seed=None if header.seed < 0 else header.seed, K=header.K,
                            generators={g.name: list(g.indices) for g in header.generators},
                            threshold=header.threshold)
    if point.generator_count != header.generator_count:
        raise DumpError('generator count {} does not match the stored blocks ({})'.format(
            header.generator_count, point.generator_count))
    logger.debug('loaded %r from %d blocks', point, len(body.blocks))
    return point


def write_dump(point, path):
    with open(path, 'wb') as f:
        f.write(dump_point(point))
    logger.info('dump of %r written to %s', point, path)


def read_dump(path):
    with open(path, 'rb') as f:
        return load_point(f.read())
