"""
Exception hierarchy for decoherence-kit
"""


class DecokitError(Exception):
    """Base class for every error raised by decokit"""


class DomainError(DecokitError, ValueError):
    """An argument lies outside the domain of the operation"""


class PoleError(DomainError):
    """An argument hits a pole (gamma at 0, -1, -2, ... or Kummer b at one)"""


class RangeOverflowError(DecokitError, OverflowError):
    """The result does not fit in the floating-point range"""


class ConvergenceError(DecokitError, ArithmeticError):
    """A series, asymptotic expansion or quadrature missed its tolerance"""


class KernelError(DomainError):
    """A momentum-transfer table is not a valid kernel"""


class ConfigError(DecokitError):
    """A run configuration could not be read or is inconsistent"""
