from typing import Callable

import numpy as np
from scipy.stats import norm

CLAMP = 1e-12


def gaussian_reparam(f: Callable) -> Callable:
    """
    Pull an integrand on R^d back to [0, 1]^d through the standard normal quantile,
    so the uniform integral over the cube equals the N(0, I) expectation of f.
    """

    def reparametrized(u):
        u = np.clip(np.asarray(u, dtype=float), CLAMP, 1.0 - CLAMP)
        return f(norm.ppf(u))

    return reparametrized
