"""Exception types raised by the screening library."""


class ScreeningError(ValueError):
    """Base class for all errors raised by :mod:`ckfscreen`."""


class InvalidInputError(ScreeningError):
    """Input violates a precondition (shape, finiteness, range)."""


class EmptyGroupError(ScreeningError):
    """A two-sample statistic was asked to compare against an empty sample."""


class DegenerateSplitError(ScreeningError):
    """A median split of a feature left one side empty."""


class DegenerateSliceError(ScreeningError):
    """A quantile slice of the response contains no observations."""

    def __init__(self, message, knots=None):
        super().__init__(message)
        self.knots = knots


class DegenerateInputError(ScreeningError):
    """A statistic is undefined for the input, e.g. zero sample variance."""


class UndefinedParameterError(ScreeningError):
    """An analytic formula was evaluated outside its domain."""


class NumericFailureError(ScreeningError):
    """Quadrature failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DatasetParseError(ScreeningError):
    """A dataset file could not be parsed.

    ``row`` and ``column`` are 1-based positions in the file (the header is
    row 1) when the failure can be located.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
