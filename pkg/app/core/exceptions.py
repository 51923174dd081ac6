"""
Error Hierarchy

Every failure the library can report is a SpectralPreserverError carrying a
human readable detail and the exit code the CLI maps it to.
"""

from typing import Any, Dict, List, Optional


USAGE_ERROR = 2
MATH_FAILURE = 1


class SpectralPreserverError(Exception):
    """Base error with a detail message and CLI exit code"""

    exit_code: int = MATH_FAILURE

    def __init__(self, detail: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "detail": self.detail, "context": self.context}


# Usage / input errors

class SchemaError(SpectralPreserverError):
    exit_code = USAGE_ERROR

    def __init__(self, detail: str, diagnostics: Optional[List[str]] = None):
        super().__init__(detail, {"diagnostics": diagnostics or []})
        self.diagnostics = diagnostics or []


class DimensionMismatch(SpectralPreserverError):
    exit_code = USAGE_ERROR


class InvalidSignature(SpectralPreserverError):
    exit_code = USAGE_ERROR


class BadExponents(SpectralPreserverError):
    exit_code = USAGE_ERROR


class DegenerateInput(SpectralPreserverError):
    exit_code = USAGE_ERROR


class PreconditionViolated(SpectralPreserverError):
    exit_code = USAGE_ERROR


class NotIdempotent(SpectralPreserverError):
    exit_code = USAGE_ERROR


# Numerical and mathematical failures

class NonConvergence(SpectralPreserverError):
    pass


class CanonicalFormNotReached(SpectralPreserverError):
    pass


class HypothesisViolated(SpectralPreserverError):
    pass


class InsufficientGenericity(SpectralPreserverError):
    pass


class SingularSystem(SpectralPreserverError):
    pass


class SingularFrame(SpectralPreserverError):
    pass


class NotPreserver(SpectralPreserverError):
    pass


class AmbiguousForm(SpectralPreserverError):
    pass


class NullSpaceDimension(SpectralPreserverError):
    pass


class NotRankOnePreserving(SpectralPreserverError):
    pass


class FrameInconsistent(SpectralPreserverError):
    pass


class ValidationFailed(SpectralPreserverError):
    pass


class NotSelfAdjointImage(SpectralPreserverError):
    pass
