"""
Sampling of shifted and scaled Wiener processes, either on a fixed grid or lazily
at whatever abscissae a quadrature rule asks for.
"""

import bisect
import math
from typing import Dict, List, Sequence

import numpy as np

from ..exceptions import InvalidInputError
from .laws import WienerPrior


def _check_grid(grid: np.ndarray, prior: WienerPrior) -> None:
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidInputError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    if grid[0] < prior.a or grid[-1] > prior.b:
        raise InvalidInputError(f"grid leaves [{prior.a}, {prior.b}]")


def wiener_sample(grid: Sequence[float], prior: WienerPrior, rng: np.random.Generator) -> np.ndarray:
    """
    Draw one path at the grid points via independent Gaussian increments.

    Args:
        grid: Strictly increasing abscissae inside [a, b]
        prior: lambda, gamma and the domain
        rng: Seeded generator

    Returns:
        Values f(x_1), ..., f(x_n)
    """
    grid = np.asarray(grid, dtype=float)
    _check_grid(grid, prior)
    variances = np.empty_like(grid)
    variances[0] = max(prior.lam * grid[0] + prior.gamma, 0.0)
    variances[1:] = prior.lam * np.diff(grid)
    return np.cumsum(np.sqrt(variances) * rng.standard_normal(grid.size))


class LazyWienerPath:
    """
    A single Wiener path realized on demand.

    New abscissae are drawn conditionally on every value realized so far: a Brownian
    bridge between neighbours, a free increment to the right of all of them, and the
    Gaussian conditional given the nearest right neighbour to the left of all of them.
    Repeated queries return the cached value.
    """

    def __init__(self, prior: WienerPrior, rng: np.random.Generator):
        self.prior = prior
        self.rng = rng
        self._xs: List[float] = []
        self._normals = np.empty(0)
        self._next = 0
        self._values: Dict[float, float] = {}

    def _draw(self) -> float:
        if self._next == self._normals.size:
            self._normals = self.rng.standard_normal(256)
            self._next = 0
        self._next += 1
        return float(self._normals[self._next - 1])

    def _variance(self, x: float) -> float:
        return max(self.prior.lam * x + self.prior.gamma, 0.0)

    def __call__(self, x: float) -> float:
        x = float(x)
        cached = self._values.get(x)
        if cached is not None:
            return cached
        if not self.prior.a <= x <= self.prior.b:
            raise InvalidInputError(f"x={x} leaves [{self.prior.a}, {self.prior.b}]")

        lam = self.prior.lam
        pos = bisect.bisect_left(self._xs, x)
        z = self._draw()
        if not self._xs:
            value = math.sqrt(self._variance(x)) * z
        elif pos == len(self._xs):
            left = self._xs[-1]
            value = self._values[left] + math.sqrt(lam * (x - left)) * z
        elif pos == 0:
            right = self._xs[0]
            var_right = self._variance(right)
            if var_right == 0.0:
                value = 0.0
            else:
                var_x = self._variance(x)
                mean = var_x / var_right * self._values[right]
                value = mean + math.sqrt(max(var_x * lam * (right - x) / var_right, 0.0)) * z
        else:
            left, right = self._xs[pos - 1], self._xs[pos]
            share = (x - left) / (right - left)
            mean = self._values[left] + share * (self._values[right] - self._values[left])
            value = mean + math.sqrt(lam * (x - left) * (right - x) / (right - left)) * z

        self._xs.insert(pos, x)
        self._values[x] = value
        return value

    @property
    def abscissae(self) -> List[float]:
        return list(self._xs)
