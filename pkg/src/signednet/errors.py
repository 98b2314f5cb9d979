"""Exception hierarchy shared by all signednet modules."""

from __future__ import annotations


class SignedNetError(Exception):
    """Base class for every error raised by signednet."""


# -- input / graph errors -------------------------------------------------


class GraphInputError(SignedNetError, ValueError):
    pass


class ParseError(GraphInputError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateEdge(GraphInputError):
    pass


class ZeroWeight(GraphInputError):
    pass


class SelfLoopRejected(GraphInputError):
    pass


class DisconnectedInput(SignedNetError, ValueError):
    pass


class LengthMismatch(SignedNetError, ValueError):
    pass


# -- numerical errors ------------------------------------------------------


class NotSymmetric(SignedNetError, ValueError):
    pass


class NoConvergence(SignedNetError, ArithmeticError):
    pass


class StepInstability(SignedNetError, ArithmeticError):
    pass


# -- compensation preconditions -------------------------------------------


class StructurallyBalanced(SignedNetError, ValueError):
    pass


class ComplexLeadingEigenvalue(SignedNetError, ValueError):
    pass


class NotPSD(SignedNetError, ValueError):
    pass


class NotBalanced(SignedNetError, ValueError):
    pass


class Divergent(SignedNetError):
    """The compensated flow is predicted (or observed) to blow up."""


class IndeterminateRegime(SignedNetError):
    """No closed-form steady state is available for this (graph, k) pair."""


class RegimeMismatch(SignedNetError):
    """Simulation and prediction disagree; ``report`` holds both verdicts."""

    def __init__(self, report):
        super().__init__(
            f"simulation verdict {report.simulated!r} does not match "
            f"predicted regime {report.predicted!r}: {report.detail}"
        )
        self.report = report
