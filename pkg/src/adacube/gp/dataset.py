from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..exceptions import InvalidInputError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design points X (n, d) in the unit cube with integrand values y (n,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise InvalidInputError(f"got {X.shape[0]} points but {y.shape[0]} values")
        if X.size and (np.any(X < 0.0) or np.any(X > 1.0)):
            raise InvalidInputError("design points must lie in the unit cube")
        if X.shape[0] > 1 and np.unique(X, axis=0).shape[0] != X.shape[0]:
            raise InvalidInputError("design points must be pairwise distinct")
        if not np.all(np.isfinite(y)):
            raise InvalidInputError("integrand values must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def empty(cls, d: int) -> "Dataset":
        return cls(np.empty((0, d)), np.empty(0))

    @classmethod
    def from_1d(cls, xs: Sequence[float], ys: Sequence[float]) -> "Dataset":
        return cls(np.asarray(xs, dtype=float).reshape(-1, 1), ys)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.n

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return bool(self.n and np.any(np.all(self.X == x, axis=1)))

    def append(self, x, value: float) -> "Dataset":
        """New dataset with one more observation."""
        x = np.asarray(x, dtype=float).reshape(1, -1)
        if self.contains(x):
            raise InvalidInputError(f"point {x.ravel().tolist()} is already in the dataset")
        return Dataset(np.vstack([self.X, x]), np.append(self.y, value))

    def with_values(self, y: Sequence[float]) -> "Dataset":
        return Dataset(self.X, y)
