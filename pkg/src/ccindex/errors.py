"""Exception types shared across the toolkit.

Everything the CLI maps to exit code 2 derives from :class:`ValidationError`;
plain :class:`OSError` maps to exit code 1.
"""


class ValidationError(ValueError):
    """Input violates a documented contract."""


class ParseError(ValidationError):
    """A text file could not be parsed."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class AlignmentError(ValidationError):
    """Two rasters do not share the same geometry."""

    def __init__(self, field, left, right):
        self.field = field
        super().__init__(f"grid geometries differ in {field}: {left!r} != {right!r}")


class BoundsError(IndexError, ValidationError):
    """Cell address outside the grid."""


class DomainError(ValidationError):
    """Coordinate outside the valid domain (e.g. latitude beyond +/-90)."""


class EmptyDomainError(ValidationError):
    """No eligible cells (or no population) to aggregate over."""


class NoCityError(ValidationError):
    """A population threshold has no qualifying city."""

    def __init__(self, threshold):
        self.threshold = threshold
        super().__init__(f"no city meets threshold p={threshold}")


class NoCoverageError(ValidationError):
    """The concentration curve is undefined without any covered cell."""

    def __init__(self):
        super().__init__("CCI undefined: no coverage")
