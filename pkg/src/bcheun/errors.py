"""Exception hierarchy.

Every error raised by the library derives from :class:`BcHeunError`, so
callers (the CLI in particular) can catch one type for "bad input" and
another for "numerics gave up".
"""


class BcHeunError(Exception):
    """Base class for all library errors."""


class ParameterError(BcHeunError, ValueError):
    """Parameters violate a precondition of the requested operation."""


class NumericalError(BcHeunError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


# special functions
class PoleAtParameter(ParameterError):
    pass


class DivergentSeries(NumericalError):
    pass


class IntegerBNotSupported(ParameterError):
    pass


# model
class AlphaZero(ParameterError):
    pass


class QZero(ParameterError):
    pass


class AlphaPlusEpsZero(ParameterError):
    pass


class OriginSingular(ParameterError):
    pass


# frobenius engine
class UnsupportedParameters(ParameterError):
    pass


class IrregularPoint(ParameterError):
    pass


class LogarithmicCase(NumericalError):
    """Frobenius recurrence hits a resonance whose right-hand side is nonzero."""


# expansions
class BetaParameterPole(ParameterError):
    pass


class GammaParameterPole(ParameterError):
    pass


class DeltaZero(ParameterError):
    pass


class EpsilonZero(ParameterError):
    pass


class RootAtOriginChosen(ParameterError):
    pass


class AtExtraSingularity(ParameterError):
    pass


class AtAuxRoot(ParameterError):
    pass


class OutsideRegion(ParameterError):
    """Evaluation point lies outside the expansion's convergence region."""


class ConditionsNotMet(ParameterError):
    pass


class NoRoot(NumericalError):
    pass


# reference oracles
class GammaNonpositiveInteger(ParameterError):
    pass


class DegenerateS0(ParameterError):
    pass


class PathTooCloseToSingularity(ParameterError):
    pass


class StepSizeUnderflow(NumericalError):
    pass
