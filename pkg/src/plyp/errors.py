"""Exception types shared across the package."""


class PlypError(Exception):
    """Base class for all package errors."""

    code = "error"


class DimensionMismatch(PlypError):
    code = "dimension-mismatch"


class UnboundedError(PlypError):
    code = "unbounded"


class TieError(PlypError):
    code = "tie"


class IncompatibleFans(PlypError):
    code = "incompatible-fans"


class UnknownChart(PlypError):
    code = "unknown-chart"


class NegativeScalar(PlypError):
    code = "negative-scalar"


class NotACone(PlypError):
    code = "not-a-cone"


class NotAPoint(PlypError):
    code = "not-a-point"


class NoDualRegistered(PlypError):
    code = "no-dual-registered"


class NotCompact(PlypError):
    code = "not-compact"


class OriginNotInterior(PlypError):
    code = "origin-not-interior"


class VerificationFailure(PlypError):
    code = "verification-failure"


class BadParams(PlypError):
    code = "bad-params"


class BadBasis(PlypError):
    code = "bad-basis"


class ParamMismatch(PlypError):
    code = "param-mismatch"


class ManifestError(PlypError):
    code = "manifest-error"
