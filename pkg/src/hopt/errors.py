"""Error hierarchy shared by every layer of the package.

Checks distinguish between a *violation* (a law fails on a concrete
instance, reported in a LawReport) and an *error* (the inputs were
malformed or a configured bound was hit).  Only the latter raise.
"""


class HoptError(Exception):
    """Base class for all package errors."""


class TypeMismatchError(HoptError):
    """Objects or morphisms were combined with incompatible types."""


class ShapeMismatchError(HoptError):
    """A payload does not fit the declared domain/codomain."""


class BoundExceededError(HoptError):
    """An enumeration or materialization exceeded a configured bound."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class UnsupportedError(HoptError):
    """The requested operation is not defined for this backend."""


class OracleFailureError(HoptError):
    """A supplied oracle returned an ill-typed or inconsistent answer."""


class LawViolationError(HoptError):
    """A construction-time law check found a violation."""


class ChainMismatchError(HoptError):
    """Adjacent tower layers do not share the required category."""


class DslError(HoptError):
    """Base class for source-program errors; carries a location."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self):
        base = super().__str__()
        if self.line is None:
            return base
        if self.column is None:
            return f"{base} (line {self.line})"
        return f"{base} (line {self.line}, column {self.column})"


class DslParseError(DslError):
    """The source program does not match the grammar."""


class DslTypeError(DslError):
    """The source program is grammatical but ill-typed."""
