"""Exception types shared across the library.

Each class carries the process exit code the command-line tools use when the
error escapes to the top level.
"""


class ExitDecayError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(ExitDecayError):
    """Invalid configuration value, scenario field, or violated precondition."""

    exit_code = 2


class NumericalError(ExitDecayError):
    """A numerical routine failed to converge or lost too much precision."""

    exit_code = 3


class InsufficientDataError(ExitDecayError):
    """Not enough usable data to produce the requested report."""

    exit_code = 4
