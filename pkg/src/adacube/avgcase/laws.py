"""
Exact average-case laws of the adaptive trapezoidal method under a Wiener prior
with covariance lambda * min(x, y) + gamma on [a, b].
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erf, xlog1py, xlogy
from scipy.stats import norm

from ..exceptions import InvalidInputError
from .trees import FullKAryTree, catalan_generating_function

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WienerPrior:
    lam: float = 1.0
    gamma: float = 0.0
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidInputError(f"lambda must be nonnegative, got {self.lam}")
        if not self.a < self.b:
            raise InvalidInputError(f"need a < b, got a={self.a}, b={self.b}")
        # lambda * min(x, y) + gamma is a covariance on [a, b] iff lambda * a + gamma >= 0
        if self.lam * self.a + self.gamma < 0:
            raise InvalidInputError(f"gamma={self.gamma} makes the covariance negative at x={self.a}")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class AverageCaseParams:
    """Settings of the adaptive trapezoidal method together with the prior it is analysed under."""

    rho: float
    m: int
    k: int
    tau: float
    prior: WienerPrior = WienerPrior()

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidInputError(f"rho must be positive, got {self.rho}")
        if self.m < 1:
            raise InvalidInputError(f"m must be >= 1, got {self.m}")
        if self.k < 2 or self.k % 2:
            raise InvalidInputError(f"the average-case laws hold for even k >= 2, got {self.k}")
        if self.tau < 0:
            raise InvalidInputError(f"tau must be nonnegative, got {self.tau}")


@dataclass(frozen=True)
class InnerNodeExpectation:
    value: float
    diverges: bool


def _scale(params: AverageCaseParams) -> float:
    prior = params.prior
    if prior.lam == 0:
        return math.inf
    return 4 * params.m / math.sqrt(prior.lam * prior.length**3)


def alpha_i(i: int, params: AverageCaseParams) -> float:
    """
    Probability that a node at depth i is accepted.

    Args:
        i: Depth, i >= 0
        params: rho, m, k, tau and the Wiener prior

    Returns:
        P(|Z| < 4 m tau (k^1.5 rho)^i / sqrt(lambda (b-a)^3)) for Z standard normal
    """
    if i < 0:
        raise InvalidInputError(f"depth must be >= 0, got {i}")
    if params.tau == 0:
        return 0.0
    level = _scale(params) * params.tau * (params.k**1.5 * params.rho) ** i
    # 2 Phi(L) - 1 == erf(L / sqrt 2), without the cancellation near L = 0
    return float(erf(level / math.sqrt(2.0)))


def alphas(depth: int, params: AverageCaseParams) -> np.ndarray:
    return np.array([alpha_i(i, params) for i in range(depth + 1)])


def log_tree_probability(tree: FullKAryTree, params: AverageCaseParams) -> float:
    if tree.k != params.k:
        raise InvalidInputError(f"tree has k={tree.k} but params have k={params.k}")
    leaves, inner = tree.depth_counts()
    alpha = alphas(tree.height, params)
    return float(np.sum(xlogy(leaves, alpha) + xlog1py(inner, -alpha)))


def tree_probability(tree: FullKAryTree, params: AverageCaseParams) -> float:
    """Probability that the method recurses exactly along the given tree."""
    return math.exp(log_tree_probability(tree, params))


def termination_threshold(params: AverageCaseParams) -> float:
    """
    Largest root tolerance for which k (1 - alpha_0) >= 1, so the expected number of
    inner nodes does not vanish when rho <= k^(-3/2).
    """
    prior = params.prior
    return float(-norm.ppf(1.0 / (2 * params.k)) * math.sqrt(prior.lam * prior.length**3) / (4 * params.m))


def expected_inner_nodes(n: int, params: AverageCaseParams) -> InnerNodeExpectation:
    """
    Expected number of inner nodes at depth n, prod_{i<n} k (1 - alpha_i).

    The flag is raised when rho <= k^(-3/2) and tau is at or below
    termination_threshold, in which case the expected evaluation count is infinite.
    """
    if n < 0:
        raise InvalidInputError(f"depth must be >= 0, got {n}")
    factors = params.k * (1.0 - alphas(n - 1, params)) if n > 0 else np.array([])
    value = float(np.prod(factors))
    diverges = params.rho <= params.k**-1.5 and params.tau <= termination_threshold(params)
    if diverges:
        logger.debug(f"expected evaluation count diverges at tau={params.tau}, rho={params.rho}")
    return InnerNodeExpectation(value=value, diverges=diverges)


def nontermination_prob_k2(alpha: float) -> float:
    """Probability of never terminating for k = 2 with constant acceptance probability alpha."""
    if not 0 <= alpha <= 1:
        raise InvalidInputError(f"alpha must be a probability, got {alpha}")
    if alpha >= 0.5:
        return 0.0
    return (1 - 2 * alpha) / (1 - alpha)


def termination_prob(alpha: float, k: int) -> float:
    """
    Probability of terminating for fan-out k with constant acceptance probability alpha,
    alpha * C_k(alpha^(k-1) (1 - alpha)) through the Catalan generating function.
    """
    if not 0 <= alpha <= 1:
        raise InvalidInputError(f"alpha must be a probability, got {alpha}")
    x = alpha ** (k - 1) * (1 - alpha)
    return min(1.0, alpha * catalan_generating_function(x, k))


def trap_error_variance(X: Sequence[float], lam: float) -> float:
    """Variance of the trapezoidal error given the integrand at X: (lambda / 12) sum dx^3."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 1 or X.size < 2:
        raise InvalidInputError(f"need at least two abscissae, got {X.size}")
    dx = np.diff(X)
    if np.any(dx <= 0):
        raise InvalidInputError("abscissae must be strictly increasing")
    return float(lam / 12.0 * np.sum(dx**3))


def prop1_lower_bound(tau: float, m: int, prior: WienerPrior = WienerPrior()) -> float:
    """
    Lower bound on P(|error| > tau) from the single-node tree alone,
    erf(c tau) (1 - erf(sqrt 3 c tau)) with c = 2 sqrt 2 m / sqrt(lambda (b-a)^3).
    """
    if not tau > 0:
        raise InvalidInputError(f"tau must be positive, got {tau}")
    c = 2 * math.sqrt(2) * m / math.sqrt(prior.lam * prior.length**3)
    return float(erf(c * tau) * (1 - erf(math.sqrt(3) * c * tau)))


def single_node_error_variance(m: int, prior: WienerPrior = WienerPrior()) -> float:
    """Error variance given the single-node tree, lambda (b-a)^3 / (48 m^2)."""
    return prior.lam * prior.length**3 / (48 * m**2)


def prob_height_at_most(depth: int, params: AverageCaseParams) -> float:
    """
    Probability that the recursion terminates without any node deeper than depth,
    which is the probability that a run with max_depth = depth is not cut off.
    """
    if depth < 0:
        raise InvalidInputError(f"depth must be >= 0, got {depth}")
    alpha = alphas(depth, params)
    prob = alpha[depth]
    for i in range(depth - 1, -1, -1):
        prob = alpha[i] + (1.0 - alpha[i]) * prob**params.k
    return float(prob)
