from .lengthscale import FieldKind, LengthscaleField, lengthscale_eval
from .product import (
    ProductKernelSpec,
    cross_matrix,
    gram_matrix,
    k1d_matrix,
    nonstat_k1d,
    product_kernel_eval,
)
from .radial import RadialBasis, RadialFamily, matern_eval

__all__ = [
    "FieldKind",
    "LengthscaleField",
    "ProductKernelSpec",
    "RadialBasis",
    "RadialFamily",
    "cross_matrix",
    "gram_matrix",
    "k1d_matrix",
    "lengthscale_eval",
    "matern_eval",
    "nonstat_k1d",
    "product_kernel_eval",
]
