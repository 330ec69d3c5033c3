"""
Gaussian-process conditioning with constant prior mean c.

    m(x)    = c + K_X(x)^T K_XX^{-1} (y - c 1)
    k(x, y) = k(x, y) - K_X(x)^T K_XX^{-1} K_X(y)

K_XX always carries the spec's diagonal jitter and is factorized by Cholesky.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.stats import norm

from ..exceptions import ConditioningError, InvalidInputError, SamplingError
from ..kernels.product import ProductKernelSpec, as_points, cross_matrix, gram_matrix
from .dataset import Dataset

logger = logging.getLogger(__name__)

JITTER_RETRIES = 3
JITTER_GROWTH = 10.0
VARIANCE_BAND = 1e-8


def robust_cholesky(K: np.ndarray, base_jitter: float, error=ConditioningError) -> np.ndarray:
    """
    Lower Cholesky factor of K, adding base_jitter * 10^r to the diagonal on retry r = 1..3.

    Args:
        K: Symmetric matrix, already carrying the base jitter
        base_jitter: Absolute diagonal increment of the first retry, before growth
        error: Exception class raised when every attempt fails

    Returns:
        Lower-triangular L with L L^T = K + extra jitter
    """
    extra = 0.0
    for attempt in range(JITTER_RETRIES + 1):
        try:
            A = K
            if extra:
                A = K.copy()
                A[np.diag_indices_from(A)] += extra
            return cholesky(A, lower=True, check_finite=True)
        except (LinAlgError, ValueError) as e:
            if attempt == JITTER_RETRIES:
                raise error(f"Error: Failed to factorize a {K.shape[0]}x{K.shape[0]} covariance: {e}") from e
            extra = base_jitter * JITTER_GROWTH ** (attempt + 1)
            logger.warning(f"Cholesky failed, retrying with extra jitter {extra:.3g}")


class ConditionedGP:
    """Factorized posterior of the process given a dataset; immutable after construction."""

    def __init__(self, spec: ProductKernelSpec, data: Dataset):
        if data.n == 0:
            raise InvalidInputError("cannot condition on an empty dataset")
        if data.d != spec.d:
            raise InvalidInputError(f"dataset has dimension {data.d}, kernel has {spec.d}")
        self.spec = spec
        self.data = data
        K = gram_matrix(spec, data.X)
        self.chol = robust_cholesky(K, spec.jitter * spec.sigma**2)
        self.residual = data.y - spec.c
        self.weights = cho_solve((self.chol, True), self.residual)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """K_XX^{-1} b."""
        return cho_solve((self.chol, True), b)

    def whiten(self, b: np.ndarray) -> np.ndarray:
        """L^{-1} b, so that (L^{-1} a)^T (L^{-1} b) = a^T K_XX^{-1} b."""
        return solve_triangular(self.chol, b, lower=True)

    def mean(self, Xq) -> np.ndarray:
        Kq = cross_matrix(self.spec, self.data.X, Xq)
        return self.spec.c + Kq.T @ self.weights

    def cov(self, Xq, Yq) -> np.ndarray:
        Xq = as_points(Xq, self.spec.d)
        Yq = as_points(Yq, self.spec.d)
        Vx = self.whiten(cross_matrix(self.spec, self.data.X, Xq))
        Vy = self.whiten(cross_matrix(self.spec, self.data.X, Yq))
        return cross_matrix(self.spec, Xq, Yq) - Vx.T @ Vy

    def var(self, Xq) -> np.ndarray:
        Xq = as_points(Xq, self.spec.d)
        V = self.whiten(cross_matrix(self.spec, self.data.X, Xq))
        raw = self.spec.diagonal() - np.sum(V * V, axis=0)
        return clip_variance(raw, self.spec.sigma**2)

    def log_marginal_likelihood(self) -> float:
        n = self.data.n
        quad = float(self.residual @ self.weights)
        logdet = 2.0 * float(np.sum(np.log(np.diag(self.chol))))
        return -0.5 * quad - 0.5 * logdet - 0.5 * n * math.log(2 * math.pi)


def clip_variance(raw, scale: float):
    """Set variances in the band [-1e-8 * scale, 0) to zero."""
    raw = np.asarray(raw, dtype=float)
    band = VARIANCE_BAND * scale
    if np.any(raw < -band):
        logger.warning(f"posterior variance {float(np.min(raw)):.3g} below the clipping band")
    clipped = np.where((raw < 0) & (raw >= -band), 0.0, raw)
    return clipped if clipped.ndim else float(clipped)


def condition(spec: ProductKernelSpec, data: Dataset) -> ConditionedGP:
    """Factorize the Gram matrix of the data and precompute the mean weights."""
    return ConditionedGP(spec, data)


def posterior_mean(gp: ConditionedGP, x) -> float:
    return float(gp.mean(as_points(x, gp.spec.d).reshape(1, -1))[0])


def posterior_cov(gp: ConditionedGP, x, y) -> float:
    """Posterior covariance of f(x) and f(y); the variance at x = y is clipped at zero in the tolerance band."""
    x = as_points(x, gp.spec.d).reshape(1, -1)
    y = as_points(y, gp.spec.d).reshape(1, -1)
    value = float(gp.cov(x, y)[0, 0])
    if np.array_equal(x, y):
        return clip_variance(value, gp.spec.sigma**2)
    return value


def posterior_var_diag(gp: ConditionedGP, X) -> np.ndarray:
    return gp.var(X)


def credible_band(gp: ConditionedGP, X, level: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
    """Pointwise equal-tailed credible interval of f on X."""
    if not 0 < level < 1:
        raise InvalidInputError(f"level must lie in (0, 1), got {level}")
    half = norm.ppf(0.5 + level / 2) * np.sqrt(gp.var(X))
    mean = gp.mean(X)
    return mean - half, mean + half


def log_marginal_likelihood(spec: ProductKernelSpec, data: Dataset) -> float:
    """log N(y; c 1, K_XX + jitter) through the Cholesky factor."""
    return ConditionedGP(spec, data).log_marginal_likelihood()


def sample_paths(gp: ConditionedGP, grid, M: int, rng: np.random.Generator) -> np.ndarray:
    """
    Joint posterior draws of f on a grid.

    Args:
        gp: Conditioned process
        grid: Non-empty point list
        M: Number of draws
        rng: Seeded generator

    Returns:
        (M, len(grid)) array
    """
    grid = as_points(grid, gp.spec.d)
    if grid.shape[0] == 0:
        raise InvalidInputError("sample_paths needs a non-empty grid")
    if M < 0:
        raise InvalidInputError(f"M must be nonnegative, got {M}")
    if M == 0:
        return np.empty((0, grid.shape[0]))
    mean = gp.mean(grid)
    cov = gp.cov(grid, grid)
    cov = 0.5 * (cov + cov.T)
    jitter = gp.spec.jitter * gp.spec.sigma**2
    cov[np.diag_indices_from(cov)] += jitter
    L = robust_cholesky(cov, jitter, error=SamplingError)
    z = rng.standard_normal((grid.shape[0], M))
    return (mean[:, None] + L @ z).T
