"""
Exception hierarchy shared by every hecke module.

Mathematical check failures are reported through report objects, not raised.
The classes below cover misuse: bad input, a violated standing regime, and
arithmetic that has no answer (inverting a non-unit).
"""

from typing import Any, Dict, Optional


class HeckeError(Exception):
    """Base class for all library errors"""


class RegimeError(HeckeError):
    """A standing assumption (l odd, r <= n_i, l^r | q-1, l prime to |W|) fails"""


class NonUnitError(HeckeError, ArithmeticError):
    """Attempted to invert a zero divisor in Z/l^r"""


class InputError(HeckeError, ValueError):
    """Malformed input: unknown group, mismatched rings, bad JSON payload"""


class OrbitError(HeckeError):
    """A Weyl orbit of characters is not free"""


class CompatibilityError(HeckeError):
    """A compatible system breaks; carries the first failing square"""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}


class VerificationError(HeckeError):
    """An internal consistency check failed where a value was required"""
