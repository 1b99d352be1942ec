"""Exception types raised across the package.

Two families exist so callers (and the command line front end) can tell a
bad input from a numerical breakdown: subclasses of :class:`ValidationError`
signal inputs that violate a precondition, subclasses of
:class:`NumericalError` signal that a computation on valid-looking input
could not be completed reliably.
"""


class MarkovConcError(Exception):
    """Base class for all package errors."""


class ValidationError(MarkovConcError, ValueError):
    pass


class NumericalError(MarkovConcError, ArithmeticError):
    pass


# kernel / distribution construction
class ShapeMismatch(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class NonStochastic(ValidationError):
    pass


class ZeroStationaryMass(ValidationError):
    pass


# spectral
class NotSelfAdjoint(ValidationError):
    pass


class NotReversible(ValidationError):
    pass


class NonUniqueStationary(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class SingularResolvent(NumericalError):
    pass


# mixing
class NoFiniteTau(ValidationError):
    pass


class ZeroGap(ValidationError):
    pass


# bounds
class MissingField(ValidationError):
    pass


class NonPositiveGap(ValidationError):
    pass


# hypothesis testing
class ZeroTransitionProbability(ValidationError):
    pass


class UnknownState(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class ThresholdOutOfRange(ValidationError):
    pass


class SearchExhaustedWarning(UserWarning):
    """The pseudo spectral gap search hit ``k_max`` without finding a positive gap."""


class TMaxTooSmallWarning(UserWarning):
    """The mixing profile scan ended before the smallest requested epsilon was reached."""
