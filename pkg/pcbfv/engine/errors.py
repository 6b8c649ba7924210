#!/usr/bin/env python3

"""
Errors

Exception hierarchy shared by the engine modules and the command line
program.  The program maps each family to a dedicated exit status.

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


class PcbfvError(Exception):
    """Base class for every error raised by the engine."""


class ConfigError(PcbfvError):
    """Invalid configuration file entry or command line option."""


class StructuralError(PcbfvError):
    """Operands with incompatible algebras, degrees or value shapes."""


class UnsupportedPairingError(StructuralError):
    """Internal product requested on degrees other than (1,1) or (2,2)."""


class DegeneracyError(PcbfvError):
    """A coframe or a pointwise linear system is degenerate.

    Attributes
    ----------
    point : tuple or None
        Grid index of the offending point, if known.
    report : dict or None
        Rank diagnostics (map id, rank, expected rank, singular values).
    """

    def __init__(self, message, point=None, report=None):
        super().__init__(message)
        self.point = point
        self.report = report


class NonUniquenessError(DegeneracyError):
    """A decomposition solve is rank deficient; carries a kernel witness."""

    def __init__(self, message, point=None, report=None, witness=None):
        super().__init__(message, point=point, report=report)
        self.witness = witness


class AliasingError(PcbfvError):
    """Grid too coarse for the tracked bandwidth of an operand."""


class SamplerError(PcbfvError):
    """No nondegenerate configuration found within the resample budget."""


class GhostNumberError(PcbfvError):
    """An action term was assembled with the wrong total ghost number."""


class DumpError(PcbfvError):
    """Unreadable or incompatible configuration dump."""


class ChecksumError(DumpError):
    """Dump body does not match its recorded digest."""
