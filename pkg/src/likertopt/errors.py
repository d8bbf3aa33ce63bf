"""Exception hierarchy shared by all likertopt modules."""

from __future__ import annotations


class LikertOptError(Exception):
    """Base class for all likertopt errors."""


# --- problem definition ---

class DimensionMismatchError(LikertOptError):
    pass


class EmptyBoxError(LikertOptError):
    pass


class NonFiniteBoundError(LikertOptError):
    pass


class OutOfBoundsError(LikertOptError):
    pass


# --- outcome sets ---

class OutcomeSetError(LikertOptError):
    """Base for outcome-set rule violations.

    ``rule`` is the stable machine-readable rule name surfaced by the HTTP
    API and mirrored by the browser client.
    """

    rule = "Invalid"


class EmptyOutcomeSetError(OutcomeSetError):
    rule = "Empty"


class LikertOutOfRangeError(OutcomeSetError):
    rule = "OutOfRangeLikert"


class CertaintyOutOfRangeError(OutcomeSetError):
    rule = "OutOfRangeCertainty"


class DuplicateLikertError(OutcomeSetError):
    rule = "DuplicateLikert"


class MixedSignsError(OutcomeSetError):
    rule = "MixedSigns"


class NotContiguousError(OutcomeSetError):
    rule = "NotContiguous"


class CertaintyFourNotSingletonError(OutcomeSetError):
    rule = "CertaintyFourNotSingleton"


class BadTolerancesError(LikertOptError):
    pass


# --- quadratic programming ---

class InfeasibleProblemError(LikertOptError):
    pass


class NumericalBreakdownError(LikertOptError):
    pass


# --- surrogate fitting ---

class IndexOutOfRangeError(LikertOptError):
    pass


class EmptyGridError(LikertOptError):
    pass


# --- acquisition / global search ---

class EmptySampleListError(LikertOptError):
    pass


class InfeasibleRegionError(LikertOptError):
    pass


# --- engine ---

class UnknownQueryError(LikertOptError):
    pass


class WrongPhaseError(LikertOptError):
    pass


class BudgetExhaustedError(LikertOptError):
    pass


# --- benchmark harness ---

class SchemaError(LikertOptError):
    pass
