"""Exception hierarchy.

Every error raised on bad input derives from :class:`ValidationError`, which the
CLI maps to exit code 2.
"""


class ValidationError(ValueError):
    """Input rejected before any computation."""


class DuplicateVertex(ValidationError):
    pass


class DegenerateSimplex(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class UnknownVertex(ValidationError, KeyError):
    pass


class NonGenericCovector(ValidationError):
    pass


class GenericityFailure(ValidationError):
    pass


class NotFaceClosed(ValidationError):
    pass


class ComplexMismatch(ValidationError):
    pass


class MixedDimension(ValidationError):
    pass


class NotConvex(ValidationError):
    pass


class IllConditioned(ValidationError):
    pass
