"""Exception types raised across the package."""


class PathExpError(ValueError):
    """Base class for every error raised by :mod:`pathexp`.

    ``context`` carries the series label, window or replication index the
    error refers to, so the CLI can emit a machine-readable record.
    """

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def to_record(self):
        return {"error": type(self).__name__, "message": str(self), "context": self.context}


class ZeroOrigin(PathExpError):
    pass


class NonFinite(PathExpError):
    pass


class TooShort(PathExpError):
    pass


class Empty(PathExpError):
    pass


class ZeroDenominator(PathExpError):
    pass


class AllDegenerate(PathExpError):
    pass


class NoWindows(PathExpError):
    pass


class MalformedCsv(PathExpError):
    pass


class InteriorGap(PathExpError):
    pass


class NonMonotonePeriods(PathExpError):
    pass


class ConfigError(PathExpError):
    pass
