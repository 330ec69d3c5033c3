"""
Exception hierarchy for adacube.

Every error raised on purpose by the package derives from AdacubeError so callers
(and the CLI) can catch one type.
"""

from typing import Any, Optional


class AdacubeError(Exception):
    """Base class for all adacube errors"""


class InvalidInputError(AdacubeError, ValueError):
    """A precondition of an operation was violated"""


class EvaluationError(AdacubeError):
    """The integrand could not be evaluated (non-finite value, failed process, ...)"""

    def __init__(self, message: str, abscissa: Any = None, partial_trace: Optional[Any] = None):
        """
        Args:
            message: Human readable description
            abscissa: The point at which the evaluation failed, if known
            partial_trace: Trace accumulated before the failure, if any
        """
        super().__init__(message)
        self.abscissa = abscissa
        self.partial_trace = partial_trace


class ProtocolError(EvaluationError):
    """The external integrand process violated the line protocol"""


class ConditioningError(AdacubeError):
    """The Gram matrix could not be factorized, even after jitter escalation"""


class SamplingError(AdacubeError):
    """A posterior covariance could not be factorized for path sampling"""


class EmbeddingError(AdacubeError):
    """Adaptive quadrature of a kernel embedding did not converge"""

    def __init__(self, message: str, piece: Any = None):
        super().__init__(message)
        self.piece = piece


class FittingError(AdacubeError):
    """Hyperparameter fitting could not start or produced nothing usable"""


class ReferenceIntegralError(AdacubeError):
    """High-accuracy reference quadrature of a synthetic integrand failed"""


class ConfigError(AdacubeError):
    """An experiment configuration is invalid"""
