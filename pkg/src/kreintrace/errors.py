"""Exception and warning types shared across the package."""


class KreinTraceError(Exception):
    """Base class for all errors raised by kreintrace."""


class NotHermitian(KreinTraceError, ValueError):
    pass


class NotUnitary(KreinTraceError, ValueError):
    pass


class NoConvergence(KreinTraceError, RuntimeError):
    pass


class DimensionMismatch(KreinTraceError, ValueError):
    pass


class DerivativeUndefined(KreinTraceError, ValueError):
    """The function has no derivative at the requested point."""


class DivergentSeries(KreinTraceError, ValueError):
    pass


class ZeroDegree(KreinTraceError, ValueError):
    pass


class UnsupportedKind(KreinTraceError, TypeError):
    pass


class BadArgument(KreinTraceError, ValueError):
    pass


class BranchAmbiguity(UserWarning):
    """An eigenvalue sits on (or next to) the branch cut of the logarithm at -1."""
