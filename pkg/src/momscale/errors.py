"""Exception types raised across the package.

Everything derives from :class:`MomScaleError` (itself a ``ValueError``) so
callers can catch the whole family at once; the CLI maps these to a nonzero
exit status and an optional JSON error document.
"""

from __future__ import annotations


class MomScaleError(ValueError):
    """Base class for all domain errors."""


# -- ingestion -------------------------------------------------------------

class ParseError(MomScaleError):
    def __init__(self, row: int, reason: str):
        self.row = row
        self.reason = reason
        super().__init__(f"row {row}: {reason}")


class NonPositivePrice(ParseError):
    def __init__(self, row: int, value: float | None = None):
        self.value = value
        super().__init__(row, f"non-positive close {value!r}")


class NonMonotonicDates(ParseError):
    def __init__(self, row: int, reason: str = "date not strictly after previous row"):
        super().__init__(row, reason)


class SeriesTooShort(MomScaleError):
    pass


class PlanInfeasible(MomScaleError):
    pass


# -- moments ---------------------------------------------------------------

class EmptyWindow(MomScaleError):
    pass


class OddOrderUnsupported(MomScaleError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"moment order must be an even integer >= 2, got {n!r}")


class ZeroVariance(MomScaleError):
    pass


# -- scaling fits ----------------------------------------------------------

class NoUsablePoints(MomScaleError):
    pass


class DegenerateDesign(MomScaleError):
    pass


class TooFewPoints(MomScaleError):
    pass


# -- simulation ------------------------------------------------------------

class InvalidSpec(MomScaleError):
    pass


class NonStationaryInit(InvalidSpec):
    pass


# -- value at risk ---------------------------------------------------------

class WindowTooSmall(MomScaleError):
    pass


# -- tail model ------------------------------------------------------------

class InvalidExponents(InvalidSpec):
    pass


class ThresholdBelowSupport(MomScaleError):
    pass


class NoSolution(MomScaleError):
    pass
