"""Exception hierarchy. The CLI maps each class to an exit code."""


class SpecgapError(Exception):
    exit_code = 1


class InputError(SpecgapError, ValueError):
    """Malformed or out-of-range input."""

    exit_code = 2


class UnsupportedRegimeError(InputError):
    """Parameters outside the range where a closed form is known (b >= 2N)."""


class NumericalError(SpecgapError, RuntimeError):
    """A numerical routine could not deliver its accuracy contract."""

    exit_code = 3


class PropertyViolation(SpecgapError, AssertionError):
    """A proven bound was violated by a computed value; indicates a bug."""

    exit_code = 4
