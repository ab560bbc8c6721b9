"""Exception hierarchy shared by every module in the package."""


class MixPhaseError(Exception):
    """Base class for all errors raised by mixphase."""


class NotHermitian(MixPhaseError, ValueError):
    pass


class NotPSD(MixPhaseError, ValueError):
    pass


class NotNormalized(MixPhaseError, ValueError):
    pass


class DimMismatch(MixPhaseError, ValueError):
    pass


class RankDeficient(MixPhaseError, ValueError):
    """The operation needs a full-rank (invertible) matrix."""


class NoConvergence(MixPhaseError, ArithmeticError):
    pass


class ZeroMagnitude(MixPhaseError, ArithmeticError):
    """The argument of a (near) zero complex number was requested.

    Raised whenever a phase would be ill-defined because the trace or
    overlap it is taken from has vanished.
    """


class VanishingOverlap(ZeroMagnitude):
    pass


class NotClosed(MixPhaseError, ValueError):
    pass


class NotAResolution(MixPhaseError, ValueError):
    """Projectors do not sum to the identity or are not idempotent."""


class GapClosure(MixPhaseError, ValueError):
    """The band gap vanishes, so the Bloch unit vector is undefined."""


class BetaTooLarge(MixPhaseError, OverflowError):
    pass


class BetaZero(MixPhaseError, ValueError):
    pass


class TruncationInsufficient(MixPhaseError, ArithmeticError):
    pass


class ConfigInvalid(MixPhaseError, ValueError):
    pass


class NumericFailure(MixPhaseError, RuntimeError):
    pass
