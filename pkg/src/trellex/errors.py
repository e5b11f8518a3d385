"""Exception hierarchy.

Two families matter to callers: ``InputError`` covers bad parameters or
files, ``VerdictFailure`` signals that a theorem-backed check failed, which
can only mean a defect or deliberately tampered input. The CLI maps them to
exit codes 1 and 2.
"""


class TrellexError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TrellexError):
    pass


class VerdictFailure(TrellexError):
    pass


# finite fields and linear algebra
class NotPrime(InputError):
    pass


class ReducibleModulus(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class FieldMismatch(InputError):
    pass


class FieldTooLarge(InputError):
    pass


class DivisionByZero(TrellexError, ZeroDivisionError):
    pass


class AmbientMismatch(InputError):
    pass


# block and convolutional codes
class ZeroMatrix(InputError):
    pass


class LengthMismatch(InputError):
    pass


class TooLargeToEnumerate(TrellexError):
    pass


class BudgetExceeded(TrellexError):
    pass


class G0RankDeficient(InputError):
    pass


class EmptyGenerator(InputError):
    pass


class NoneFound(TrellexError):
    pass


class DegreeUnknown(TrellexError):
    pass


# trellis codes
class NotDeterministic(VerdictFailure):
    pass


class HypothesisViolated(InputError):
    pass


class NoInfinitePath(TrellexError):
    pass


# graphs
class RejectionBudgetExceeded(TrellexError):
    pass


class ConvergenceFailure(TrellexError):
    pass


class EmptySubset(InputError):
    pass


# expander construction
class DimensionZero(TrellexError):
    pass


class RankAssertionFailed(VerdictFailure):
    pass


class ClaimViolated(VerdictFailure):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class WitnessViolated(VerdictFailure):
    def __init__(self, message, decomposition=None):
        super().__init__(message)
        self.decomposition = decomposition


class BoundViolated(VerdictFailure):
    pass


class InputParseError(InputError):
    pass
