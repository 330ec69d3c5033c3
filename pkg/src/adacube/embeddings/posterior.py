"""
The Gaussian law of the integral I(f) = integral f(x) dx over [0, 1]^d given data,

    mu_n      = c + (y - c 1)^T K_XX^{-1} z
    sigma_n^2 = sigma^2 prod_i double_i - z^T K_XX^{-1} z

with z_j = integral k(x, x_j) dx, plus the variance after adding a design point,
which does not depend on the value observed there.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import InvalidInputError
from ..gp.conditioned import ConditionedGP, clip_variance
from ..gp.dataset import Dataset
from ..kernels.product import ProductKernelSpec, as_points, cross_matrix
from .cache import EmbeddingCache

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PosteriorIntegral:
    mu: float
    sigma: float
    n: int

    def __post_init__(self):
        if self.sigma < 0:
            raise InvalidInputError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def variance(self) -> float:
        return self.sigma**2

    def z_score(self, truth: float) -> float:
        """(mu - truth) / sigma; infinite when sigma is zero and mu misses the truth."""
        if self.sigma == 0:
            return 0.0 if self.mu == truth else math.copysign(math.inf, self.mu - truth)
        return (self.mu - truth) / self.sigma


class IntegralPosterior:
    """A conditioned process together with its kernel embeddings; reused to score many candidates."""

    def __init__(self, spec: ProductKernelSpec, data: Dataset, cache: Optional[EmbeddingCache] = None):
        self.spec = spec
        self.data = data
        self.cache = cache if cache is not None else EmbeddingCache(enabled=False)
        self.prior_variance = self.cache.prior_variance(spec)
        if data.n:
            self.gp: Optional[ConditionedGP] = ConditionedGP(spec, data)
            self.z = self.cache.means(spec, data.X)
            self.w = self.gp.whiten(self.z)
            mu = spec.c + float(self.gp.weights @ self.z)
            raw = self.prior_variance - float(self.w @ self.w)
        else:
            self.gp = None
            self.z = np.empty(0)
            self.w = np.empty(0)
            mu = spec.c
            raw = self.prior_variance
        self.variance = clip_variance(raw, spec.sigma**2)
        self.result = PosteriorIntegral(mu=mu, sigma=math.sqrt(max(self.variance, 0.0)), n=data.n)

    def augmented_variances(self, candidates) -> np.ndarray:
        """
        sigma_n^2 after adding each candidate, by a Schur-complement update:
        the reduction is (z_x - k_x^T K^{-1} z)^2 / (k_xx + jitter - k_x^T K^{-1} k_x).
        """
        C = as_points(candidates, self.spec.d)
        spec = self.spec
        z_c = self.cache.means(spec, C)
        k_cc = spec.diagonal() + spec.jitter * spec.sigma**2
        if self.gp is None:
            num = z_c
            schur = np.full(C.shape[0], k_cc)
        else:
            V = self.gp.whiten(cross_matrix(spec, self.data.X, C))
            num = z_c - V.T @ self.w
            schur = k_cc - np.sum(V * V, axis=0)
        schur = np.maximum(schur, spec.jitter * spec.sigma**2)
        return clip_variance(self.variance - num**2 / schur, spec.sigma**2)


def posterior_integral(spec: ProductKernelSpec, data: Dataset, cache: Optional[EmbeddingCache] = None) -> PosteriorIntegral:
    """
    Posterior mean and standard deviation of the integral over the unit cube.

    Args:
        spec: Kernel hyperparameters
        data: Observations; empty data gives the prior law
        cache: Embedding memo; None computes every embedding afresh

    Returns:
        PosteriorIntegral
    """
    return IntegralPosterior(spec, data, cache).result


def augmented_variance(spec: ProductKernelSpec, data: Dataset, cache: Optional[EmbeddingCache], x_new) -> float:
    """
    sigma_n^2 for the design augmented by x_new, by refactorizing the enlarged Gram
    matrix. The variance involves no y values, so a placeholder is observed.
    """
    x_new = as_points(x_new, spec.d).reshape(1, -1)
    if data.contains(x_new):
        raise InvalidInputError(f"point {x_new.ravel().tolist()} is already in the design")
    augmented = data.append(x_new, spec.c)
    return float(IntegralPosterior(spec, augmented, cache).variance)


def augmented_variances(spec: ProductKernelSpec, data: Dataset, cache: Optional[EmbeddingCache], candidates) -> np.ndarray:
    """Vectorized augmented_variance through the Schur-complement update."""
    C = as_points(candidates, spec.d)
    for row in C:
        if data.contains(row):
            raise InvalidInputError(f"candidate {row.tolist()} is already in the design")
    return IntegralPosterior(spec, data, cache).augmented_variances(C)
