"""Exception hierarchy shared by all qdotspec modules."""


class QdotError(Exception):
    """Base class for all qdotspec errors."""


class PoleError(QdotError):
    """Evaluation requested at (or too close to) a pole of the function."""


class DomainError(QdotError):
    """Arguments outside the supported domain."""


class AccuracyError(QdotError):
    """Internal error estimate exceeded the accuracy budget."""


class QuadratureError(QdotError):
    """A quadrature failed to reach the requested tolerance."""


class ConvergenceError(QdotError):
    """Root solver failed to converge; carries bracket diagnostics."""

    def __init__(self, msg, bracket=None, iterations=None):
        super().__init__(msg)
        self.bracket = bracket
        self.iterations = iterations


class CaseError(QdotError):
    """The requested (n, alpha, q) case is not covered by the formula."""


class ConfigError(QdotError):
    """Invalid or incomplete oscillator configuration."""


class CoincidenceError(QdotError):
    """Kernel evaluated on the diagonal x = y where it diverges."""


class PerturbedPoleError(QdotError):
    """zeta is an eigenvalue of the perturbed operator (Q = alpha)."""
