"""Exception types raised across the package."""


class GaFaultError(Exception):
    """Base class for all package errors."""


class AntiparallelPlanes(GaFaultError, ArithmeticError):
    """The rotor between two opposite unit bivectors is undefined."""


class ZeroBivector(GaFaultError, ArithmeticError):
    pass


class InsufficientPoints(GaFaultError, ValueError):
    pass


class NoNonNegativeEigenvalue(GaFaultError, ArithmeticError):
    """The constrained eigenproblem has no admissible (ellipse) solution."""


class SingularNormalization(GaFaultError, ArithmeticError):
    pass


class NotAnEllipse(GaFaultError, ValueError):
    """Fitted conic is a hyperbola, parabola or degenerate line pair."""


class DegenerateCloud(GaFaultError, ValueError):
    pass


class NonUniformSampling(GaFaultError, ValueError):
    pass


class AmbiguousPattern(GaFaultError, ValueError):
    """Bivector components match no ground-fault template."""

    def __init__(self, message, bnorm=None):
        super().__init__(message)
        self.bnorm = bnorm


class MalformedCsv(GaFaultError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
