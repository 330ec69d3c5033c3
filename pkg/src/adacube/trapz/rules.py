"""Composite trapezoidal rules on uniform and non-uniform grids."""

import math
from typing import Callable, Sequence

import numpy as np

from ..exceptions import EvaluationError, InvalidInputError

Evaluator = Callable[[float], float]


def checked_eval(f: Evaluator, x: float) -> float:
    """Evaluate f at x and reject non-finite values."""
    value = float(f(x))
    if not math.isfinite(value):
        raise EvaluationError(f"integrand returned {value} at x={x!r}", abscissa=x)
    return value


def composite_sum(values: Sequence[float], width: float) -> float:
    """Trapezoidal sum of equally spaced values covering an interval of the given width."""
    n = len(values) - 1
    interior = math.fsum(values[1:-1])
    return width / (2 * n) * (values[0] + values[-1] + 2.0 * interior)


def trap_rule(f: Evaluator, a: float, b: float, n: int) -> float:
    """
    Composite trapezoidal rule with n equal panels.

    Args:
        f: Scalar integrand
        a: Left endpoint
        b: Right endpoint, b > a
        n: Number of panels, n >= 1

    Returns:
        (b-a)/(2n) [f(a) + f(b) + 2 sum f(a + i(b-a)/n)]
    """
    if not a < b:
        raise InvalidInputError(f"trap_rule needs a < b, got a={a}, b={b}")
    if n < 1:
        raise InvalidInputError(f"trap_rule needs n >= 1, got {n}")
    values = [checked_eval(f, a + (b - a) * i / n) for i in range(n)]
    values.append(checked_eval(f, b))
    return composite_sum(values, b - a)


def trap_rule_nonuniform(X: Sequence[float], y: Sequence[float]) -> float:
    """Trapezoidal rule through the points (X[i], y[i]); X strictly increasing."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 1 or X.size < 2:
        raise InvalidInputError(f"need at least two abscissae, got {X.size}")
    if y.shape != X.shape:
        raise InvalidInputError(f"got {X.size} abscissae but {y.size} values")
    if np.any(np.diff(X) <= 0):
        raise InvalidInputError("abscissae must be strictly increasing")
    return float(0.5 * np.sum((y[1:] + y[:-1]) * np.diff(X)))
