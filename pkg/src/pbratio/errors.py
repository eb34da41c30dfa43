"""Exception hierarchy shared by every module of the package."""


class PoissonBinomialError(ValueError):
    """Base class for all input and domain errors raised by pbratio."""


class ValueOutOfRange(PoissonBinomialError):
    """A Bernoulli parameter lies outside [0, 1)."""


class DegenerateLambda(PoissonBinomialError):
    """All parameters are zero, so the sum is identically zero."""


class InvalidLambda(PoissonBinomialError):
    """A Poisson mean that is not strictly positive and finite."""


class TooLarge(PoissonBinomialError):
    """An exhaustive enumeration would exceed its size limit."""


class UndefinedRatio(PoissonBinomialError):
    """A mass ratio was requested where the denominator mass is zero."""


class ScaleOutOfRange(PoissonBinomialError):
    """A ray scale t outside (0, 1]."""


class UnsupportedPoint(PoissonBinomialError):
    """A point x outside the support of the (scaled) distribution."""


class EmptyGrid(PoissonBinomialError):
    """A ray grid with no points, or with points that are unsorted."""


class ConsistencyError(AssertionError):
    """Two independent computations of the same quantity disagree."""


class OracleDisagreement(ConsistencyError):
    """The two brute-force routes of the oracle disagree.

    Raised rather than warned: a disagreement means the oracle itself is
    broken and no check built on it can be trusted.
    """
