"""Candidate point sets for the acquisition step."""

from typing import Iterable, Sequence

import numpy as np

from ..exceptions import InvalidInputError
from ..gp.dataset import Dataset


def candidate_set_1d(data: Dataset) -> np.ndarray:
    """Midpoints of consecutive sorted abscissae, as an (n-1, 1) array."""
    if data.d != 1:
        raise InvalidInputError(f"midpoint candidates need d = 1, got d = {data.d}")
    xs = np.sort(data.X[:, 0])
    if xs.size < 2:
        raise InvalidInputError("midpoint candidates need at least two data points")
    return ((xs[:-1] + xs[1:]) / 2).reshape(-1, 1)


def product_grid(U: Sequence[Sequence[float]]) -> np.ndarray:
    """All points of U_1 x ... x U_d, in lexicographic order."""
    axes = [np.asarray(u, dtype=float) for u in U]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def candidate_set_grid(U: Sequence[Sequence[float]], used: Iterable, K_n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Uniform sample without replacement of K_n grid points not yet used.

    Args:
        U: Grid per axis
        used: Points already in the design
        K_n: Sample size
        rng: Seeded generator

    Returns:
        (K_n, d) array
    """
    if K_n < 0:
        raise InvalidInputError(f"K_n must be nonnegative, got {K_n}")
    grid = product_grid(U)
    taken = {tuple(np.asarray(p, dtype=float).ravel()) for p in used}
    available = np.array([tuple(p) not in taken for p in grid], dtype=bool) if taken else np.ones(len(grid), dtype=bool)
    pool = grid[available]
    if K_n > pool.shape[0]:
        raise InvalidInputError(f"asked for {K_n} candidates but only {pool.shape[0]} grid points remain")
    if K_n == 0:
        return np.empty((0, grid.shape[1]))
    index = rng.choice(pool.shape[0], size=K_n, replace=False)
    return pool[index]


def scheduled_count(K1: int, n: int) -> int:
    """K_n = K_1 + 1 - n, never below one."""
    return max(K1 + 1 - n, 1)


class MidpointCandidates:
    """Midpoints of the current design, for d = 1."""

    def __call__(self, data: Dataset, n: int) -> np.ndarray:
        return candidate_set_1d(data)


class GridCandidates:
    def __init__(self, U: Sequence[Sequence[float]], K1: int, rng: np.random.Generator):
        """
        Args:
            U: Grid per axis
            K1: Candidate count at the first acquisition; K_n = K1 + 1 - n after that
            rng: Seeded generator shared across iterations
        """
        self.U = [np.asarray(u, dtype=float) for u in U]
        self.K1 = K1
        self.rng = rng
        self.size = int(np.prod([u.size for u in self.U]))

    def __call__(self, data: Dataset, n: int) -> np.ndarray:
        on_grid = sum(1 for p in data.X if all(np.any(u == v) for u, v in zip(self.U, p)))
        K_n = min(scheduled_count(self.K1, n), self.size - on_grid)
        return candidate_set_grid(self.U, data.X, K_n, self.rng)
