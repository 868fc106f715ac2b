"""Exception hierarchy shared by the library and the CLI.

Each class carries a stable machine-readable ``code`` used by the CLI when
reporting errors as JSON.
"""


class WvgeoError(Exception):
    """Base class for all library errors."""

    code = "error"


class ParseError(WvgeoError):
    """Input text could not be read or decoded."""

    code = "parse-error"


class ValidationError(WvgeoError):
    """Input was decoded but violates a documented contract."""

    code = "validation-error"


class DimensionMismatchError(ValidationError):
    code = "dimension-mismatch"


class ZeroStateError(WvgeoError):
    """A zero vector was passed where a ray is required."""

    code = "zero-state"


class NonHermitianError(ValidationError):
    code = "non-hermitian"


class NonUnitaryError(ValidationError):
    code = "non-unitary"


class NonRealExpectationError(WvgeoError):
    """Expectation value kept an imaginary residue above tolerance."""

    code = "non-real-expectation"


class OrthogonalPrePostError(WvgeoError):
    """Pre- and post-selected states are orthogonal: the weak value diverges."""

    code = "orthogonal-pre-post"


class NilImageError(WvgeoError):
    """The observable annihilates the pre-selected state."""

    code = "nil-image"


class VanishingExpectationError(WvgeoError):
    """The observable's expectation vanishes; the proportional split is undefined."""

    code = "vanishing-expectation"


class NonConvergentError(WvgeoError):
    """Successive small-parameter estimates failed to settle."""

    code = "non-convergent"


class VanishingOverlapError(WvgeoError):
    """A required state overlap is numerically zero."""

    code = "vanishing-overlap"


class DegenerateStarTriangleError(WvgeoError):
    """A post-state star is orthogonal to the mapped pre-state star.

    The partially computed decomposition (undefined entries as NaN) is
    attached as ``partial``.
    """

    code = "degenerate-star-triangle"

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegenerateTriangleError(WvgeoError):
    """A spherical-triangle vertex pair is orthogonal or antipodal."""

    code = "degenerate-triangle"


class OrthogonalEndpointsError(WvgeoError):
    """Geodesic endpoints are orthogonal; the connecting geodesic is not unique."""

    code = "orthogonal-endpoints"
