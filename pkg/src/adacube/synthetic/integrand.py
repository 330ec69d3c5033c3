"""
Random test integrands on [0, 1]^d: per axis, a smooth bump of height H and radius R
at C plus a steep sigmoid step, multiplied across axes.

    f(x) = prod_i [ H_i g_{F_i}((x_i - C_i) / R_i) + (-1)^{P_i} (1/2 - h(x_i - C_i)) ]
    g_F(z) = exp(-1 / (1 - z^2) + cos(F pi |z|)) for |z| < 1, else 0
    h(x) = 1 / (1 + exp(-80 x))
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

from ..exceptions import InvalidInputError, ReferenceIntegralError

logger = logging.getLogger(__name__)

SIGMOID_SLOPE = 80.0
REFERENCE_TOL = 1e-10
QUAD_LIMIT = 500


@dataclass(frozen=True)
class SyntheticParams:
    C: np.ndarray
    R: np.ndarray
    H: np.ndarray
    F: np.ndarray
    P: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        arrays = {}
        for name in ("C", "R", "H", "F", "P"):
            arrays[name] = np.atleast_1d(np.asarray(getattr(self, name), dtype=float)).copy()
        sizes = {a.shape for a in arrays.values()}
        if len(sizes) != 1 or arrays["C"].ndim != 1 or arrays["C"].size == 0:
            raise InvalidInputError(f"C, R, H, F, P must be vectors of one common length, got shapes {sorted(sizes)}")
        if np.any(arrays["R"] <= 0):
            raise InvalidInputError("bump radii R must be positive")
        for name, value in arrays.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def d(self) -> int:
        return self.C.size

    def to_dict(self) -> dict:
        return {
            "C": self.C.tolist(),
            "R": self.R.tolist(),
            "H": self.H.tolist(),
            "F": self.F.tolist(),
            "P": [int(p) for p in self.P],
            "d": self.d,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "SyntheticParams":
        return cls(
            C=payload["C"],
            R=payload["R"],
            H=payload["H"],
            F=payload["F"],
            P=payload["P"],
            seed=payload.get("seed"),
        )

    @classmethod
    def one_dimensional(cls, C: float, R: float, H: float, F: float, P: int) -> "SyntheticParams":
        return cls(C=[C], R=[R], H=[H], F=[F], P=[P])


def sample_params(d: int, rng: np.random.Generator, seed: Optional[int] = None) -> SyntheticParams:
    """
    Draw C ~ U(0.1, 0.9), R ~ Beta(5, 2), H ~ U(e/2, 3e/2), F ~ U(0, 5), P ~ Bernoulli(1/2), independently per axis.

    Args:
        d: Dimension
        rng: Seeded generator
        seed: Recorded with the parameters for replay

    Returns:
        SyntheticParams
    """
    if d < 1:
        raise InvalidInputError(f"d must be >= 1, got {d}")
    return SyntheticParams(
        C=rng.uniform(0.1, 0.9, size=d),
        R=rng.beta(5.0, 2.0, size=d),
        H=rng.uniform(0.5 * math.e, 1.5 * math.e, size=d),
        F=rng.uniform(0.0, 5.0, size=d),
        P=rng.integers(0, 2, size=d),
        seed=seed,
    )


def bump(z, F):
    """g_F(z), exactly zero for |z| >= 1."""
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    z_in = np.where(inside, z, 0.0)
    with np.errstate(over="ignore"):
        value = np.exp(-1.0 / (1.0 - z_in**2) + np.cos(F * np.pi * np.abs(z_in)))
    return np.where(inside, value, 0.0)


def axis_factor(x, C: float, R: float, H: float, F: float, P: float):
    """One factor of the product, vectorized over x."""
    x = np.asarray(x, dtype=float)
    step = 0.5 - expit(SIGMOID_SLOPE * (x - C))
    sign = -1.0 if int(P) % 2 else 1.0
    return H * bump((x - C) / R, F) + sign * step


def eval_integrand(p: SyntheticParams, x) -> np.ndarray | float:
    """
    Evaluate the integrand at one point (shape (d,), or a float in d = 1) or at rows of an (n, d) array.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 0 or (pts.ndim == 1 and p.d > 1) or (pts.ndim == 1 and pts.size == 1)
    pts = pts.reshape(-1, p.d) if pts.ndim < 2 else pts
    if pts.shape[1] != p.d:
        raise InvalidInputError(f"points have dimension {pts.shape[1]}, integrand has {p.d}")
    value = np.ones(pts.shape[0])
    for i in range(p.d):
        value *= axis_factor(pts[:, i], p.C[i], p.R[i], p.H[i], p.F[i], p.P[i])
    return float(value[0]) if single else value


def axis_integral(C: float, R: float, H: float, F: float, P: float) -> float:
    """Integral of one factor over [0, 1], split at the edges of the bump support."""
    breaks = sorted({0.0, 1.0, *[b for b in (C - R, C, C + R) if 0.0 < b < 1.0]})
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        out = quad(
            lambda t: float(axis_factor(t, C, R, H, F, P)),
            lo,
            hi,
            epsabs=REFERENCE_TOL,
            epsrel=REFERENCE_TOL,
            limit=QUAD_LIMIT,
            full_output=1,
        )
        if len(out) > 3:
            raise ReferenceIntegralError(f"Error: Failed to integrate on [{lo:.6g}, {hi:.6g}]: {out[3]}")
        total += out[0]
    return total


def reference_integral(p: SyntheticParams) -> float:
    """Product over axes of the one-dimensional factor integrals."""
    value = 1.0
    for i in range(p.d):
        value *= axis_integral(p.C[i], p.R[i], p.H[i], p.F[i], p.P[i])
    logger.debug(f"reference integral {value:.12g} for d = {p.d}")
    return value


FIXTURES: Dict[str, SyntheticParams] = {
    "illustration": SyntheticParams.one_dimensional(C=0.554, R=0.0726, H=1.64, F=2.65, P=1),
    "kernel_choice": SyntheticParams.one_dimensional(C=0.835, R=0.111, H=3.50, F=1.63, P=0),
    "lengthscale_choice": SyntheticParams.one_dimensional(C=0.882, R=0.0892, H=3.61, F=4.73, P=0),
    "full_vs_empirical": SyntheticParams.one_dimensional(C=0.520, R=0.0897, H=1.87, F=3.04, P=1),
}

# reference values to two or three significant figures; kernel_choice and
# lengthscale_choice integrate to about 0.55 and carry no checkpoint
FIXTURE_INTEGRALS: Dict[str, float] = {
    "illustration": 0.011,
    "full_vs_empirical": 0.0764,
}


def fixture(name: str) -> SyntheticParams:
    try:
        return FIXTURES[name]
    except KeyError:
        raise InvalidInputError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None


def as_evaluator(p: SyntheticParams):
    """The integrand as a callable of one point."""
    return lambda x: eval_integrand(p, x)


def sample_many(d: int, count: int, seed: int) -> Sequence[SyntheticParams]:
    """count integrands, the i-th drawn from its own generator seeded by (seed, i)."""
    return [sample_params(d, np.random.default_rng([seed, i]), seed=seed * 1_000_003 + i) for i in range(count)]
