"""Exception types. Each maps to one CLI exit code."""


class IIETError(Exception):
    exit_code = 1


class SubstitutionError(IIETError, ValueError):
    """Malformed substitution text or an invalid rule."""

    exit_code = 2


class ConfigError(IIETError, ValueError):
    """Bad initial/dual order or config file."""

    exit_code = 2


class ConvergenceError(IIETError, ArithmeticError):
    exit_code = 3


class AssumptionError(IIETError, ValueError):
    """An operation's standing hypothesis does not hold for this rule."""

    exit_code = 4


class CapExceeded(IIETError, OverflowError):
    exit_code = 5


class InvalidAddress(IIETError, ValueError):
    exit_code = 2


class SaturatedAddress(IIETError, ValueError):
    """The address is maximal among its known digits; no successor exists."""

    exit_code = 4


class MaxDepthExceeded(IIETError, ValueError):
    exit_code = 4
