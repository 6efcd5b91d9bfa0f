"""Exception hierarchy shared by every crnext module."""

from __future__ import annotations


class CrnError(Exception):
    """Base class for all errors raised by crnext."""


class InvalidNetwork(CrnError):
    """Raised when an operation that requires a valid E-graph receives an invalid one."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


# -- parsing ---------------------------------------------------------------


class ParseError(CrnError):
    """One or more diagnostics were produced while reading a network."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class MixedRates(ParseError):
    pass


class DuplicateEdge(ParseError):
    pass


class NonpositiveRate(ParseError):
    pass


# -- linear algebra / certificates ------------------------------------------


class NoSeparator(CrnError):
    """No vector in the span is orthogonal to the given set while separating ``orient``."""


class NotASeparator(CrnError):
    def __init__(self, message, edge=None):
        self.edge = edge
        super().__init__(message)


class NotApplicable(CrnError):
    """The construction only applies to networks that are not weakly reversible."""


class NotDeficiencyZero(CrnError):
    pass


class NotFirstOrder(CrnError):
    pass


# -- dynamics ----------------------------------------------------------------


class NonpositiveState(CrnError, ValueError):
    pass


class NegativeState(CrnError, ValueError):
    pass


class StepLimitExceeded(CrnError):
    pass


class NegativeOvershoot(CrnError):
    pass


class MaxIterations(CrnError):
    pass


class SingularJacobian(CrnError):
    pass


class NotConserved(CrnError):
    pass
