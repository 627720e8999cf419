"""Exception types shared across the package."""


class VassError(Exception):
    """Base class for all errors raised by this package."""


class DomainViolation(VassError):
    """A step left the location domain (a finite entry went negative)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ResourceLimit(VassError):
    """A configured cap was exceeded. Never a silent truncation."""


class PreconditionUnmet(VassError):
    pass


class InternalInconsistency(VassError):
    """A constructed witness failed re-validation. Indicates a bug."""


class LiftUndefined(VassError):
    pass


class NotEff2D(VassError):
    pass


class ParseError(VassError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
