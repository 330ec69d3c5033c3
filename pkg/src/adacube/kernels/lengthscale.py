"""
Positive lengthscale fields on [0, 1].

Parameters are unconstrained reals alphas. For PiecewiseLinear, PiecewiseConstant
and Constant the nodal values are beta = exp(alpha); for ExpPiecewiseLinear the
field is exp of the linear interpolant of the alphas themselves.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from ..exceptions import InvalidInputError


class FieldKind(str, Enum):
    PIECEWISE_LINEAR = "PiecewiseLinear"
    PIECEWISE_CONSTANT = "PiecewiseConstant"
    EXP_PIECEWISE_LINEAR = "ExpPiecewiseLinear"
    CONSTANT = "Constant"


def _mean_exp(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Mean of exp over a segment on which the exponent runs linearly from lo to hi."""
    delta = hi - lo
    small = np.abs(delta) < 1e-8
    safe = np.where(small, 1.0, delta)
    return np.exp(lo) * np.where(small, 1.0 + delta / 2 + delta**2 / 6, np.expm1(delta) / safe)


def _mean_reciprocal(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Mean of 1/l over a segment on which l runs linearly from lo > 0 to hi > 0."""
    ratio = hi / lo - 1.0
    small = np.abs(ratio) < 1e-8
    safe = np.where(small, 1.0, ratio)
    return np.where(small, 1.0 - ratio / 2 + ratio**2 / 3, np.log1p(safe) / safe) / lo


@dataclass(frozen=True, eq=False)
class LengthscaleField:
    kind: FieldKind
    knots: np.ndarray
    alphas: np.ndarray = field(repr=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        alphas = np.asarray(self.alphas, dtype=float)
        object.__setattr__(self, "kind", FieldKind(self.kind))
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "alphas", alphas)
        if knots.ndim != 1 or knots.size < 2 or knots[0] != 0.0 or knots[-1] != 1.0:
            raise InvalidInputError("knots must run from 0 to 1")
        if np.any(np.diff(knots) <= 0):
            raise InvalidInputError("knots must be strictly increasing")
        expected = {
            FieldKind.PIECEWISE_LINEAR: knots.size,
            FieldKind.EXP_PIECEWISE_LINEAR: knots.size,
            FieldKind.PIECEWISE_CONSTANT: knots.size - 1,
            FieldKind.CONSTANT: 1,
        }[self.kind]
        if alphas.shape != (expected,):
            raise InvalidInputError(f"{self.kind.value} field with {knots.size} knots needs {expected} parameters, got {alphas.size}")
        if not np.all(np.isfinite(alphas)):
            raise InvalidInputError("field parameters must be finite")

    @classmethod
    def uniform(cls, kind: FieldKind, n_knots: int = 11, n_cells: int = 10, value: float = 1.0) -> "LengthscaleField":
        """
        Field equal to value everywhere.

        Args:
            kind: Parametrization
            n_knots: Knot count for the piecewise-linear kinds
            n_cells: Cell count for the piecewise-constant kind
            value: Positive lengthscale

        Returns:
            LengthscaleField
        """
        kind = FieldKind(kind)
        if kind == FieldKind.CONSTANT:
            knots = np.array([0.0, 1.0])
            size = 1
        elif kind == FieldKind.PIECEWISE_CONSTANT:
            knots = np.linspace(0.0, 1.0, n_cells + 1)
            size = n_cells
        else:
            knots = np.linspace(0.0, 1.0, n_knots)
            size = n_knots
        return cls(kind, knots, np.full(size, np.log(value)))

    @classmethod
    def from_values(cls, kind: FieldKind, knots: Sequence[float], values: Sequence[float]) -> "LengthscaleField":
        """Build a field from its nodal values beta (for ExpPiecewiseLinear, the interpolated exponents)."""
        kind = FieldKind(kind)
        values = np.asarray(values, dtype=float)
        if kind == FieldKind.EXP_PIECEWISE_LINEAR:
            return cls(kind, knots, values)
        if np.any(values <= 0):
            raise InvalidInputError("lengthscale values must be positive")
        return cls(kind, knots, np.log(values))

    def with_alphas(self, alphas: Sequence[float]) -> "LengthscaleField":
        return LengthscaleField(self.kind, self.knots, np.asarray(alphas, dtype=float))

    @property
    def betas(self) -> np.ndarray:
        if self.kind == FieldKind.EXP_PIECEWISE_LINEAR:
            return self.alphas.copy()
        return np.exp(self.alphas)

    @property
    def breakpoints(self) -> np.ndarray:
        """Interior points where the field is not smooth."""
        if self.kind == FieldKind.CONSTANT:
            return np.array([])
        return self.knots[1:-1]

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
            raise InvalidInputError("lengthscale fields are defined on [0, 1]")
        if self.kind == FieldKind.CONSTANT:
            value = np.full_like(x_arr, np.exp(self.alphas[0]))
        elif self.kind == FieldKind.PIECEWISE_LINEAR:
            value = np.interp(x_arr, self.knots, np.exp(self.alphas))
        elif self.kind == FieldKind.EXP_PIECEWISE_LINEAR:
            value = np.exp(np.interp(x_arr, self.knots, self.alphas))
        else:
            # cells are [x_j, x_{j+1}) with the last one closed at 1
            cell = np.clip(np.searchsorted(self.knots, x_arr, side="right") - 1, 0, self.alphas.size - 1)
            value = np.exp(self.alphas)[cell]
        return value if value.ndim else float(value)

    def integral(self) -> float:
        """Closed form of the integral of the field over [0, 1]."""
        widths = np.diff(self.knots)
        if self.kind == FieldKind.CONSTANT:
            return float(np.exp(self.alphas[0]))
        if self.kind == FieldKind.PIECEWISE_CONSTANT:
            return float(np.sum(widths * np.exp(self.alphas)))
        if self.kind == FieldKind.PIECEWISE_LINEAR:
            beta = np.exp(self.alphas)
            return float(np.sum(widths * (beta[1:] + beta[:-1]) / 2))
        return float(np.sum(widths * _mean_exp(self.alphas[:-1], self.alphas[1:])))

    def reciprocal_integral(self) -> float:
        """Closed form of the integral of 1 / field over [0, 1]."""
        widths = np.diff(self.knots)
        if self.kind == FieldKind.CONSTANT:
            return float(np.exp(-self.alphas[0]))
        if self.kind == FieldKind.PIECEWISE_CONSTANT:
            return float(np.sum(widths * np.exp(-self.alphas)))
        if self.kind == FieldKind.PIECEWISE_LINEAR:
            beta = np.exp(self.alphas)
            return float(np.sum(widths * _mean_reciprocal(beta[:-1], beta[1:])))
        return float(np.sum(widths * _mean_exp(-self.alphas[:-1], -self.alphas[1:])))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "knots": self.knots.tolist(), "alphas": self.alphas.tolist()}


def lengthscale_eval(field: LengthscaleField, x: float) -> float:
    """Value of the lengthscale field at a single x in [0, 1]."""
    return float(field(x))
