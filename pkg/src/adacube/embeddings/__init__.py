from .cache import DoubleIntegralMethod, EmbeddingCache
from .posterior import (
    IntegralPosterior,
    PosteriorIntegral,
    augmented_variance,
    augmented_variances,
    posterior_integral,
)
from .univariate import kernel_double_1d, kernel_double_1d_grid, kernel_mean_1d, kernel_means_1d

__all__ = [
    "DoubleIntegralMethod",
    "EmbeddingCache",
    "IntegralPosterior",
    "PosteriorIntegral",
    "augmented_variance",
    "augmented_variances",
    "kernel_double_1d",
    "kernel_double_1d_grid",
    "kernel_mean_1d",
    "kernel_means_1d",
    "posterior_integral",
]
