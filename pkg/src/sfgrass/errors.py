"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); the CLI maps
them to exit code 1.  Numerical failures derive from :class:`NumericalError`
and map to exit code 2.
"""


class SfGrassError(Exception):
    """Base class for all package errors."""


class InputError(SfGrassError, ValueError):
    """Invalid user input (bad ids, weights, shapes, files)."""


class NumericalError(SfGrassError, ArithmeticError):
    """A numerical routine failed on otherwise valid input."""


class NegativeWeight(InputError):
    def __init__(self, u, v, w=None):
        self.u, self.v, self.w = u, v, w
        super().__init__(f"negative weight {w!r} on edge ({u}, {v})")


class NodeIdOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class IsolatedNode(InputError):
    pass


class DegenerateColumn(NumericalError):
    pass


class EmbeddingMismatch(InputError):
    pass


class InconsistentMap(InputError):
    pass


class InvalidAggregation(InputError):
    pass


class TooLargeForDense(InputError):
    pass


class DifferentComponents(InputError):
    pass


class NotSpanning(InputError):
    pass


class NotSubgraph(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class NumericalBreakdown(NumericalError):
    pass


class MalformedHeader(InputError):
    pass


class UnsupportedField(InputError):
    pass


class EntryCountMismatch(InputError):
    pass


class IndexOutOfBounds(InputError):
    pass


class NonSquareMatrix(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
