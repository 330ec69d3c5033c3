"""Penalties on the lengthscale fields subtracted from the log marginal likelihood."""

import math
from dataclasses import dataclass

from ..exceptions import InvalidInputError
from ..kernels.product import ProductKernelSpec

# sigma^2 phi(|x-y| / l) written with our per-axis prefactor 1/sqrt(2) has lengthscale sqrt(2) l
STATIONARY_SCALE = math.sqrt(2.0)


@dataclass(frozen=True)
class Regularizer:
    """r(theta) = prod_i (lambda1 ||l_i||_1 + lambda2 ||1/l_i||_1) with L1 norms over [0, 1]."""

    lambda1: float = 30.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise InvalidInputError(f"penalty weights must be nonnegative, got {self.lambda1}, {self.lambda2}")

    def __call__(self, spec: ProductKernelSpec) -> float:
        value = 1.0
        for field in spec.fields:
            value *= self.lambda1 * field.integral() + self.lambda2 * field.reciprocal_integral()
        return value


@dataclass(frozen=True)
class LinearLengthscalePenalty:
    """
    weight * sum_i ||l_i||_1, for the stationary model. The weight applies to the
    lengthscales of sigma^2 phi(|x-y| / l), which are sqrt(2) times ours.
    """

    weight: float = 0.0

    def __call__(self, spec: ProductKernelSpec) -> float:
        if self.weight == 0:
            return 0.0
        return self.weight * STATIONARY_SCALE * sum(field.integral() for field in spec.fields)


def regularizer_value(reg: Regularizer, spec: ProductKernelSpec) -> float:
    return reg(spec)
