"""Exception types shared across the package.

``NumericalError`` subclasses signal runtime numerical failure (blow-up,
singular transforms, non-convergent quadrature); the CLI maps them to
exit code 3. Bad arguments and malformed input stay plain ``ValueError``.
"""


class NumericalError(Exception):
    """A computation failed for numerical (not usage) reasons."""


class EvalError(NumericalError):
    """Expression evaluation hit a pole, a negative sqrt, or overflow."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within the refinement budget."""


class InconsistentCoefficientsError(NumericalError):
    """A coefficient set violates the structural reduction it was asked to satisfy."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class SingularTransformError(NumericalError):
    """A phase-transform quantity (scaling or denominator) crossed zero."""

    def __init__(self, message, when=None):
        super().__init__(message)
        self.when = when


class OrbitEscapeError(NumericalError):
    """A planar orbit left the trusted numerical range."""


class BlowUpError(NumericalError):
    """Field amplitudes exceeded the blow-up guard; carries the last good state."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
