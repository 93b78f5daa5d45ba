"""Exception hierarchy shared by all plasmod modules."""


class PlasmodError(Exception):
    """Base class for every error raised by plasmod."""


class SingularMatrix(PlasmodError):
    pass


class ResonantSingularity(SingularMatrix):
    """Linear system is singular because the structure sits exactly on a lossless resonance."""


class NoConvergence(PlasmodError):
    pass


class DegenerateLeadingCoefficient(PlasmodError):
    pass


class NoRealFrequency(PlasmodError):
    pass


class ExactResonanceSingularity(PlasmodError):
    pass


class EigenvalueHit(PlasmodError):
    pass


class SourceSingularity(PlasmodError):
    pass


class NegativeLoss(PlasmodError):
    pass


class DegenerateInterface(PlasmodError):
    pass


class HypothesisViolated(PlasmodError):
    """Selected shell mode cannot be excited by a uniform field (all overlaps vanish)."""


class ConfigError(PlasmodError):
    pass
