"""Adaptive trapezoidal and Bayesian cubature with nonstationary Gaussian process models."""

from .exceptions import (
    AdacubeError,
    ConditioningError,
    ConfigError,
    EmbeddingError,
    EvaluationError,
    FittingError,
    InvalidInputError,
    ProtocolError,
    ReferenceIntegralError,
    SamplingError,
)

__version__ = "0.1.0"

__all__ = [
    "AdacubeError",
    "ConditioningError",
    "ConfigError",
    "EmbeddingError",
    "EvaluationError",
    "FittingError",
    "InvalidInputError",
    "ProtocolError",
    "ReferenceIntegralError",
    "SamplingError",
    "__version__",
]
