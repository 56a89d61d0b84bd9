"""Exceptions raised by the engine; every one derives from EngineError."""
from fractions import Fraction
from typing import Optional


class EngineError(Exception):
    """Base class for every error raised by the exact-arithmetic engine."""


class MapFormatError(EngineError):
    """Map data that is not a piecewise-linear circle homeomorphism."""

    def __init__(self, message: str, vertex_index: Optional[int] = None):
        self.vertex_index = vertex_index
        if vertex_index is not None:
            message = f"vertex {vertex_index}: {message}"
        super().__init__(message)


class PreconditionError(EngineError):
    pass


class SignatureMismatchError(PreconditionError):
    """Signature words do not match under the requested component matching."""


class UnsatisfiableConstraintError(EngineError):
    pass


class RotationNumberUnknown(EngineError):
    """Raised when a rational rotation number could not be certified."""

    def __init__(self, lo: Fraction, hi: Fraction, iterations: int):
        self.lo = lo
        self.hi = hi
        self.iterations = iterations
        super().__init__(f"rotation number not certified rational, bracket [{lo}, {hi}] after {iterations} iterations")


class IterationCapExceeded(EngineError):
    def __init__(self, point: Fraction, iterations: int):
        self.point = point
        self.iterations = iterations
        super().__init__(f"orbit search from {point} exceeded {iterations} unwindings")


class VerificationFailure(EngineError):
    def __init__(self, route: str, law: str, sample: Fraction, expected: Fraction, actual: Fraction):
        self.route = route
        self.law = law
        self.sample = sample
        self.expected = expected
        self.actual = actual
        super().__init__(f"{route}: {law} fails at x={sample}: expected {expected}, got {actual}")


class ArchiveFormatError(EngineError):
    """A witness archive or expression tree that cannot be read back."""
