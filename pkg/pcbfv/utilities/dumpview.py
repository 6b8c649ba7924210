#!/usr/bin/env python3

"""
Print the header and field blocks of a pcbfv configuration dump.

    dumpview.py dump.pcbf              header and block table
    dumpview.py dump.pcbf omega        plus a hex dump of each omega block

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

import hexdump

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.realpath(__file__))))

from engine.dump import block_array, parse_dump  # noqa: E402
from engine.errors import DumpError  # noqa: E402


def mask_name(mask):
    bits = [str(k) for k in range(mask.bit_length()) if (mask >> k) & 1]
    return 'theta' + ''.join('_' + b for b in bits) if bits else '1'


def display_header(header):
    print('theory      {}'.format(header.theory))
    print('seed        {}'.format(header.seed if header.seed >= 0 else 'none'))
    print('K           {}'.format(header.K))
    print('grid        {}'.format(header.grid))
    print('generators  {}'.format(header.generator_count))
    print('Lambda      {}'.format(header.Lambda))
    print('threshold   {}'.format(header.threshold))
    print('lie         {}'.format(header.lie or '-'))
    print('normal      {}'.format(', '.join('{:.6g}'.format(v) for v in header.normal)))
    for block in header.generators:
        print('  {:<8s}  {}'.format(block.name, list(block.indices)))


def display_blocks(blocks, selected=None):
    print('{:<7s} {:<10s} {:>3s} {:>3s} {:>5s} {:<16s} {:<20s} {:>12s}'.format(
        'role', 'name', 'i', 'j', 'ghost', 'monomial', 'shape', 'max |value|'))
    for block in blocks:
        values = block_array(block)
        peak = float(abs(values).max()) if values.size else 0.0
        print('{:<7s} {:<10s} {:>3d} {:>3d} {:>5d} {:<16s} {:<20s} {:>12.4e}'.format(
            str(block.role), block.name, block.i, block.j, block.ghost, mask_name(block.mask),
            'x'.join(str(n) for n in block.shape), peak))
        if selected is not None and block.name == selected:
            hexdump.hexdump(block.payload)


def main():
    if len(sys.argv) < 2:
        print("Usage: dumpview.py dump_file [field_name]")
        sys.exit(2)
    with open(sys.argv[1], 'rb') as f:
        data = f.read()
    try:
        body = parse_dump(data)
    except DumpError as err:
        print('{}: {}'.format(sys.argv[1], err))
        sys.exit(1)
    display_header(body.header)
    print()
    display_blocks(body.blocks, sys.argv[2] if len(sys.argv) > 2 else None)


if __name__ == "__main__":
    # execute only if run as a script
    main()
