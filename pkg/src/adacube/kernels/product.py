"""
Non-stationary univariate kernel and the tensor-product covariance

    k(x, y) = sigma^2 prod_i k_i(x_i, y_i),
    k_i(x, y) = sqrt(l(x) l(y)) / sqrt(l(x)^2 + l(y)^2) phi(|x - y| / sqrt(l(x)^2 + l(y)^2)).
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import InvalidInputError
from .lengthscale import FieldKind, LengthscaleField
from .radial import RadialBasis

logger = logging.getLogger(__name__)

DEFAULT_JITTER = 1e-10


def as_points(X, d: int) -> np.ndarray:
    """Coerce a point list to an (n, d) array inside the unit cube."""
    pts = np.asarray(X, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if d == 1 else pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != d:
        raise InvalidInputError(f"expected points of dimension {d}, got shape {np.shape(X)}")
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise InvalidInputError("points must lie in the unit cube")
    return pts


def k1d_matrix(rbf: RadialBasis, field: LengthscaleField, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Univariate non-stationary kernel between every entry of xs and every entry of ys."""
    lx = np.asarray(field(xs), dtype=float)[:, None]
    ly = np.asarray(field(ys), dtype=float)[None, :]
    norm = np.sqrt(lx**2 + ly**2)
    dist = np.abs(np.asarray(xs, dtype=float)[:, None] - np.asarray(ys, dtype=float)[None, :])
    return np.sqrt(lx * ly) / norm * rbf.eval(dist / norm)


def nonstat_k1d(rbf: RadialBasis, field: LengthscaleField, x: float, y: float) -> float:
    """Univariate non-stationary kernel at a single pair x, y in [0, 1]."""
    return float(k1d_matrix(rbf, field, np.array([x]), np.array([y]))[0, 0])


@dataclass(frozen=True)
class ProductKernelSpec:
    """Hyperparameters theta = {c, sigma, l_1..l_d} together with the radial basis."""

    c: float
    sigma: float
    fields: Tuple[LengthscaleField, ...]
    rbf: RadialBasis = RadialBasis()
    jitter: float = DEFAULT_JITTER

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.sigma > 0:
            raise InvalidInputError(f"sigma must be positive, got {self.sigma}")
        if not self.fields:
            raise InvalidInputError("need at least one lengthscale field")

    @property
    def d(self) -> int:
        return len(self.fields)

    @classmethod
    def default(
        cls,
        d: int,
        kind: FieldKind = FieldKind.PIECEWISE_LINEAR,
        rbf: RadialBasis = RadialBasis(),
        c: float = 0.0,
        sigma: float = 1.0,
        lengthscale: float = 1.0,
        n_knots: int = 11,
        n_cells: int = 10,
        jitter: float = DEFAULT_JITTER,
    ) -> "ProductKernelSpec":
        """Spec with the same uniform field on every axis."""
        fields = [LengthscaleField.uniform(kind, n_knots=n_knots, n_cells=n_cells, value=lengthscale) for _ in range(d)]
        return cls(c=c, sigma=sigma, fields=tuple(fields), rbf=rbf, jitter=jitter)

    def diagonal(self) -> float:
        """k(x, x), the same for every x: sigma^2 (1/sqrt 2)^d."""
        return self.sigma**2 * 0.5 ** (self.d / 2)

    def to_vector(self) -> np.ndarray:
        """Unconstrained parameters (c, log sigma, alphas of field 1, ..., alphas of field d)."""
        return np.concatenate([[self.c, np.log(self.sigma)], *[f.alphas for f in self.fields]])

    def with_vector(self, v: Sequence[float]) -> "ProductKernelSpec":
        v = np.asarray(v, dtype=float)
        sizes = [f.alphas.size for f in self.fields]
        if v.size != 2 + sum(sizes):
            raise InvalidInputError(f"parameter vector has {v.size} entries, expected {2 + sum(sizes)}")
        fields: List[LengthscaleField] = []
        offset = 2
        for f, size in zip(self.fields, sizes):
            fields.append(f.with_alphas(v[offset : offset + size]))
            offset += size
        return ProductKernelSpec(c=float(v[0]), sigma=float(np.exp(v[1])), fields=tuple(fields), rbf=self.rbf, jitter=self.jitter)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "sigma": self.sigma,
            "nu": self.rbf.nu,
            "fields": [f.to_dict() for f in self.fields],
        }


def cross_matrix(spec: ProductKernelSpec, X, Y) -> np.ndarray:
    """[k(x_i, y_j)] for point lists X and Y."""
    X = as_points(X, spec.d)
    Y = as_points(Y, spec.d)
    K = np.full((X.shape[0], Y.shape[0]), spec.sigma**2)
    for i, fld in enumerate(spec.fields):
        K *= k1d_matrix(spec.rbf, fld, X[:, i], Y[:, i])
    return K


def product_kernel_eval(spec: ProductKernelSpec, x, y) -> float:
    """Covariance between two points of the unit cube."""
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != spec.d or y.size != spec.d:
        raise InvalidInputError(f"points must have dimension {spec.d}, got {x.size} and {y.size}")
    return float(cross_matrix(spec, x.reshape(1, -1), y.reshape(1, -1))[0, 0])


def gram_matrix(spec: ProductKernelSpec, X, jitter: bool = True) -> np.ndarray:
    """
    Symmetric Gram matrix on X.

    Args:
        spec: Kernel hyperparameters
        X: Non-empty point list
        jitter: Add spec.jitter * sigma^2 to the diagonal

    Returns:
        (n, n) array
    """
    X = as_points(X, spec.d)
    if X.shape[0] == 0:
        raise InvalidInputError("gram_matrix needs at least one point")
    K = cross_matrix(spec, X, X)
    if jitter:
        K[np.diag_indices_from(K)] += spec.jitter * spec.sigma**2
    return K
