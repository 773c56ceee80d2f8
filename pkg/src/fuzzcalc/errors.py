"""Exception hierarchy shared by all fuzzcalc modules."""


class FuzzError(Exception):
    """Base class for every error raised by fuzzcalc."""


class DomainError(FuzzError, ValueError):
    """An argument lies outside the domain of an operation (alpha, t, ...)."""


class StructureError(FuzzError, ValueError):
    """Malformed input: mismatched lengths, bad grids, wrong shapes."""


class GridMismatchError(FuzzError, ValueError):
    """Two fuzzy numbers were combined on different alpha grids."""


class CaseError(FuzzError):
    """A closed form was requested for a model of the wrong case."""


class PreconditionError(FuzzError, ValueError):
    """Model data violates an assumption of a closed-form solution."""


class NumericError(FuzzError, ArithmeticError):
    """Numeric failure: singular coefficients or non-finite values."""


class SingularityError(NumericError):
    """The ratio k1/k2 is undefined because k2 vanishes."""


class DivergenceError(NumericError):
    """Integration produced a non-finite state.

    ``last_t`` is the last time at which the state was still finite.
    """

    def __init__(self, message, last_t=None):
        super().__init__(message)
        self.last_t = last_t


class ConfigError(FuzzError, ValueError):
    """Invalid model configuration. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
