"""Half-integer Matérn radial basis functions."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..exceptions import InvalidInputError


class RadialFamily(str, Enum):
    MATERN = "Matern"


SUPPORTED_NU = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class RadialBasis:
    """
    phi(d) = exp(-sqrt(2 nu) d) a! / (2a)! sum_{i=0}^{a} (a+i)! / (i! (a-i)!) (2 sqrt(2 nu) d)^(a-i)
    for nu = a + 1/2.
    """

    family: RadialFamily = RadialFamily.MATERN
    nu: float = 1.5

    def __post_init__(self):
        if self.nu not in SUPPORTED_NU:
            raise InvalidInputError(f"nu must be one of {SUPPORTED_NU}, got {self.nu}")

    @property
    def order(self) -> int:
        return int(self.nu - 0.5)

    def eval(self, dist):
        """Evaluate phi elementwise; dist may be a scalar or an array."""
        d = np.asarray(dist, dtype=float)
        if np.any(d < 0):
            raise InvalidInputError("distance must be nonnegative")
        a = self.order
        scale = math.sqrt(2 * self.nu)
        arg = 2 * scale * d
        poly = np.zeros_like(d)
        for i in range(a + 1):
            coeff = math.factorial(a + i) / (math.factorial(i) * math.factorial(a - i))
            poly = poly + coeff * arg ** (a - i)
        value = np.exp(-scale * d) * poly * math.factorial(a) / math.factorial(2 * a)
        return value if value.ndim else float(value)


def matern_eval(rbf: RadialBasis, dist: float) -> float:
    """Matérn radial basis at a single nonnegative distance."""
    if dist < 0:
        raise InvalidInputError(f"distance must be nonnegative, got {dist}")
    return float(rbf.eval(dist))
