"""
Integrals of the univariate non-stationary kernel against the uniform measure on [0, 1].

Every integral is split where the integrand is not smooth (field knots and, for the
kernel mean, the kink x = u) and each piece is integrated by adaptive Gauss-Kronrod
cubature. A value depends only on its own arguments, never on which batch it was
computed in.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import cubature

from ..exceptions import EmbeddingError
from ..kernels.lengthscale import LengthscaleField
from ..kernels.radial import RadialBasis

logger = logging.getLogger(__name__)

SINGLE_ATOL = 1e-10
DOUBLE_ATOL = 1e-9
MAX_SUBDIVISIONS = 2000


def _k1d_pairs(rbf: RadialBasis, field: LengthscaleField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise kernel k(x_i, y_i)."""
    lx = np.asarray(field(x), dtype=float)
    ly = np.asarray(field(y), dtype=float)
    norm = np.sqrt(lx**2 + ly**2)
    return np.sqrt(lx * ly) / norm * rbf.eval(np.abs(x - y) / norm)


def _integrate(f, lo, hi, atol: float, piece) -> float:
    try:
        res = cubature(f, lo, hi, rule="gk21", atol=atol, rtol=1e-12, max_subdivisions=MAX_SUBDIVISIONS)
    except Exception as e:
        raise EmbeddingError(f"Error: Failed to integrate piece {piece}: {e}", piece=piece) from e
    if res.status != "converged":
        raise EmbeddingError(f"quadrature did not converge on piece {piece} (error {float(res.error):.3g})", piece=piece)
    return float(res.estimate)


def _pieces(field: LengthscaleField, extra: Sequence[float] = ()) -> np.ndarray:
    cuts = np.concatenate([[0.0, 1.0], field.breakpoints, np.asarray(extra, dtype=float)])
    return np.unique(np.clip(cuts, 0.0, 1.0))


def kernel_mean_1d(rbf: RadialBasis, field: LengthscaleField, u: float) -> float:
    """
    integral_0^1 k(x, u) dx.

    Args:
        rbf: Radial basis
        field: Lengthscale field
        u: Fixed argument in [0, 1]

    Returns:
        The kernel mean at u, to absolute tolerance 1e-10
    """
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise EmbeddingError(f"u={u} leaves [0, 1]", piece=None)
    edges = _pieces(field, [u])
    atol = SINGLE_ATOL / (edges.size - 1)

    def integrand(x: np.ndarray) -> np.ndarray:
        xs = np.clip(x[:, 0], 0.0, 1.0)
        return _k1d_pairs(rbf, field, xs, np.full_like(xs, u))

    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _integrate(integrand, [lo], [hi], atol, (u, lo, hi))
    return total


def kernel_means_1d(rbf: RadialBasis, field: LengthscaleField, us: Sequence[float]) -> np.ndarray:
    """kernel_mean_1d at every entry of us; repeated entries are integrated once."""
    us = np.asarray(us, dtype=float).reshape(-1)
    unique, inverse = np.unique(us, return_inverse=True)
    values = np.array([kernel_mean_1d(rbf, field, u) for u in unique])
    return values[inverse] if us.size else np.empty(0)


def kernel_double_1d(rbf: RadialBasis, field: LengthscaleField) -> float:
    """
    integral_0^1 integral_0^1 k(x, y) dx dy over the squares cut out by the field knots.

    Cells off the diagonal are smooth and appear twice by symmetry. A diagonal cell
    [c0, c1]^2 is twice its upper triangle, mapped onto a square by
    y = x + s (c1 - x) with Jacobian (c1 - x), which moves the kink x = y onto s = 0.
    """
    edges = _pieces(field)
    cells = list(zip(edges[:-1], edges[1:]))
    n = len(cells)
    atol = DOUBLE_ATOL / (n * (n + 1) / 2)

    def off_diagonal(p: np.ndarray) -> np.ndarray:
        return _k1d_pairs(rbf, field, np.clip(p[:, 0], 0.0, 1.0), np.clip(p[:, 1], 0.0, 1.0))

    total = 0.0
    for i, (a0, a1) in enumerate(cells):

        def diagonal(p: np.ndarray, c1=a1) -> np.ndarray:
            x = p[:, 0]
            y = np.clip(x + p[:, 1] * (c1 - x), 0.0, 1.0)
            return _k1d_pairs(rbf, field, np.clip(x, 0.0, 1.0), y) * (c1 - x)

        total += 2.0 * _integrate(diagonal, [a0, 0.0], [a1, 1.0], atol, ("diag", a0, a1))
        for b0, b1 in cells[i + 1 :]:
            total += 2.0 * _integrate(off_diagonal, [a0, b0], [a1, b1], atol, ("cell", a0, a1, b0, b1))
    return total


def grid_weights(N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Abscissae and trapezoid weights of an N-point uniform grid on [0, 1]."""
    if N < 2:
        raise EmbeddingError(f"grid needs at least two points, got {N}", piece=None)
    nodes = np.linspace(0.0, 1.0, N)
    weights = np.full(N, 1.0 / (N - 1))
    weights[[0, -1]] *= 0.5
    return nodes, weights


def kernel_double_1d_grid(rbf: RadialBasis, field: LengthscaleField, N: int = 101) -> float:
    """Double integral approximated by the N x N product trapezoid rule."""
    nodes, weights = grid_weights(N)
    X, Y = np.meshgrid(nodes, nodes, indexing="ij")
    K = _k1d_pairs(rbf, field, X.ravel(), Y.ravel()).reshape(N, N)
    return float(weights @ K @ weights)
