"""Exception types shared across the package.

The CLI maps InputError to exit code 1 and CapsExceeded /
UnsupportedConfiguration to exit code 2; everything else is a bug.
"""


class LogClassError(Exception):
    pass


class InputError(LogClassError):
    """Malformed user input (bad polynomial, bad flag value...)."""


class CapsExceeded(LogClassError):
    """A configured cap (degree, discriminant, enumeration box) was hit."""


class UnsupportedConfiguration(LogClassError):
    """A case outside the supported v1 surface; never a wrong answer."""


class MixedPrimes(LogClassError):
    """Arithmetic between scalars living over different primes."""


class ZeroAtPrecision(LogClassError):
    """Division by, or log of, a value indistinguishable from 0."""
