import math
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..exceptions import InvalidInputError
from ..gp.conditioned import ConditionedGP
from ..kernels.product import as_points
from ..synthetic.integrand import SyntheticParams


def mse_bound(gp: ConditionedGP, holdout_X, holdout_y: Sequence[float]) -> Tuple[float, float]:
    """
    (1/m) sum_i [(mean(y_i) - f(y_i))^2 + var(y_i)] over held-out points, an upper bound
    on the expected squared error of the integral, with its standard error across points.
    """
    X = as_points(holdout_X, gp.spec.d)
    y = np.asarray(holdout_y, dtype=float).reshape(-1)
    if X.shape[0] == 0 or X.shape[0] != y.size:
        raise InvalidInputError(f"need a non-empty holdout with one value per point, got {X.shape[0]} points and {y.size} values")
    terms = (gp.mean(X) - y) ** 2 + gp.var(X)
    se = float(np.std(terms, ddof=1) / math.sqrt(terms.size)) if terms.size > 1 else 0.0
    return float(np.mean(terms)), se


def relative_error(estimate: float, truth: float) -> float:
    return abs((estimate - truth) / truth)


def covers(mu: float, sigma: float, truth: float, level: float = 0.95) -> bool:
    """Whether truth lies in the central level-interval of N(mu, sigma^2)."""
    return abs(mu - truth) <= norm.ppf(0.5 + level / 2) * sigma


def mean_and_se(values: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return math.nan, math.nan
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def bump_density_ratio(points: Sequence[float], params: SyntheticParams) -> float:
    """
    Points per unit length inside the bump [C - R, C + R], clipped to [0, 1], over points
    per unit length outside it. Only the first axis is used.

    Returns:
        inf when every point falls inside the bump, nan when there are none
    """
    x = np.asarray(points, dtype=float).reshape(-1)
    lo = max(float(params.C[0] - params.R[0]), 0.0)
    hi = min(float(params.C[0] + params.R[0]), 1.0)
    width = hi - lo
    if x.size == 0 or not 0 < width < 1:
        return math.nan
    inside = int(np.count_nonzero((x >= lo) & (x <= hi)))
    outside = x.size - inside
    if outside == 0:
        return math.inf
    return (inside / width) / (outside / (1.0 - width))
