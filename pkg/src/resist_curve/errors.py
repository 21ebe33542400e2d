"""Exception hierarchy shared by all modules."""


class ResistCurveError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(ResistCurveError, ValueError):
    pass


class SelfLoop(GraphError):
    pass


class NonpositiveWeight(GraphError):
    pass


class DuplicateLink(GraphError):
    pass


class IndexOutOfRange(GraphError):
    pass


class LinkNotFound(GraphError, KeyError):
    pass


class GraphParseError(GraphError):
    """Malformed graph file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericalError(ResistCurveError, ArithmeticError):
    pass


class SingularBlock(NumericalError):
    pass


class SingularOmega(NumericalError):
    pass


class NegativeEigenvalue(NumericalError):
    pass


class SolverDivergence(NumericalError):
    pass


class NonLinearTail(NumericalError):
    """Small-t extrapolation did not behave as expected."""


class NotADistribution(ResistCurveError, ValueError):
    pass


class InvalidFaceDegree(ResistCurveError, ValueError):
    pass


class InfeasibleMarginals(NumericalError):
    pass


class InvalidSize(ResistCurveError, ValueError):
    pass


class OutOfRange(ResistCurveError, ValueError):
    pass


class ZeroArea(ResistCurveError, ValueError):
    pass


class QuadratureFailure(NumericalError):
    pass


class MissingGeometry(ResistCurveError, ValueError):
    pass


class Disconnected(ResistCurveError, ValueError):
    pass


class FlowHalt(NumericalError):
    """Base for flow integration halts; ``t`` is the time of the halt."""

    def __init__(self, message, t, trajectory=None):
        super().__init__(f"{message} (t={t:.17g})")
        self.t = t
        self.trajectory = trajectory


class BlowUpDetected(FlowHalt):
    pass


class LeftLaplacianCone(FlowHalt):
    pass


class DisconnectedDuringFlow(FlowHalt):
    pass


class PastBlowUp(ResistCurveError, ValueError):
    pass
