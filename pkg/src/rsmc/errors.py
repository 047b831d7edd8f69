"""Exception types shared across the package."""


class RsmcError(Exception):
    """Base class for every error raised by this package."""


class ParseError(RsmcError):
    """Malformed edge-list input."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class WeightError(RsmcError):
    """Edge weight outside the allowed range."""


class DuplicateEdgeError(RsmcError):
    """The same ordered vertex pair appeared more than once."""


class DirectedInputError(RsmcError):
    """An operation defined only for undirected graphs received a directed one."""


class DimensionMismatchError(RsmcError):
    """Matrix dimensions do not match the graph, or each other."""


class NegativeEpsilonError(RsmcError):
    """The community parameter must be nonnegative."""


class UnknownVertexError(RsmcError):
    """A vertex index is out of range for the graph at hand."""


class TooLargeError(RsmcError):
    """Input exceeds the size cap of an exhaustive operation."""


class AllZeroProfileError(RsmcError):
    """A speed profile with no positive sample has no transmission-time statistics."""


class InvalidSpecError(RsmcError):
    """A similarity specification violates its invariants."""


class UnknownDatasetError(RsmcError):
    """No builtin dataset is registered under the requested name."""


class NumericalError(RsmcError):
    """A numerical routine failed to reach the required accuracy."""


class SingularityError(NumericalError):
    """A matrix expected to be invertible is numerically singular."""
