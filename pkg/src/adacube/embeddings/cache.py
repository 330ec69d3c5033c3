"""
Memo of the univariate kernel integrals that make up the tensor-product embeddings.

Entries are keyed by dimension, abscissa and the current theta version. Installing a
different kernel spec bumps the version and drops every older entry.
"""

import logging
import threading
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..kernels.product import ProductKernelSpec
from .univariate import kernel_double_1d, kernel_double_1d_grid, kernel_mean_1d

logger = logging.getLogger(__name__)


class DoubleIntegralMethod(str, Enum):
    QUADRATURE = "quadrature"
    GRID = "grid"


class EmbeddingCache:
    def __init__(
        self,
        grid: Optional[Sequence[Sequence[float]]] = None,
        double_method: DoubleIntegralMethod = DoubleIntegralMethod.QUADRATURE,
        grid_n: int = 101,
        enabled: bool = True,
    ):
        """
        Args:
            grid: Candidate grid U per dimension, kept for reference by the callers
            double_method: Adaptive quadrature or an N x N grid sum for the double integrals
            grid_n: N of the grid sum
            enabled: When False every request is computed afresh
        """
        self.grid = [np.asarray(g, dtype=float) for g in grid] if grid is not None else None
        self.double_method = DoubleIntegralMethod(double_method)
        self.grid_n = grid_n
        self.enabled = enabled
        self.theta_version = 0
        self.single_integrals: Dict[Tuple[int, float, int], float] = {}
        self.double_integrals: Dict[Tuple[int, int], float] = {}
        self.hits = 0
        self.misses = 0
        self._signature: Optional[bytes] = None
        self._lock = threading.Lock()

    @staticmethod
    def _spec_signature(spec: ProductKernelSpec) -> bytes:
        parts = [np.asarray([spec.rbf.nu], dtype=float).tobytes()]
        for f in spec.fields:
            parts.append(f.kind.value.encode())
            parts.append(f.knots.tobytes())
            parts.append(f.alphas.tobytes())
        return b"|".join(parts)

    def use(self, spec: ProductKernelSpec) -> int:
        """Make spec current, bumping the theta version if its kernel differs. Returns the version."""
        signature = self._spec_signature(spec)
        with self._lock:
            if signature != self._signature:
                self._signature = signature
                self.theta_version += 1
                self.single_integrals.clear()
                self.double_integrals.clear()
                logger.debug(f"embedding cache moved to theta version {self.theta_version}")
            return self.theta_version

    def _get_or_compute(self, store: dict, key, compute):
        if not self.enabled:
            return compute()
        with self._lock:
            if key in store:
                self.hits += 1
                return store[key]
        value = compute()
        with self._lock:
            self.misses += 1
            store[key] = value
        return value

    def single(self, spec: ProductKernelSpec, dim: int, u: float) -> float:
        version = self.use(spec)
        u = float(u)
        return self._get_or_compute(
            self.single_integrals,
            (dim, u, version),
            lambda: kernel_mean_1d(spec.rbf, spec.fields[dim], u),
        )

    def double(self, spec: ProductKernelSpec, dim: int) -> float:
        version = self.use(spec)
        if self.double_method == DoubleIntegralMethod.GRID:
            compute = lambda: kernel_double_1d_grid(spec.rbf, spec.fields[dim], self.grid_n)
        else:
            compute = lambda: kernel_double_1d(spec.rbf, spec.fields[dim])
        return self._get_or_compute(self.double_integrals, (dim, version), compute)

    def means(self, spec: ProductKernelSpec, X: np.ndarray) -> np.ndarray:
        """z_i = sigma^2 prod_dim integral k_dim(x, X[i, dim]) dx for every row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        z = np.full(X.shape[0], spec.sigma**2)
        for dim in range(spec.d):
            column = X[:, dim]
            unique, inverse = np.unique(column, return_inverse=True)
            values = np.array([self.single(spec, dim, u) for u in unique])
            z *= values[inverse] if column.size else 1.0
        return z

    def prior_variance(self, spec: ProductKernelSpec) -> float:
        """sigma^2 prod_dim double integral of k_dim."""
        value = spec.sigma**2
        for dim in range(spec.d):
            value *= self.double(spec, dim)
        return value
