"""
Monte Carlo study of the adaptive trapezoidal method on Wiener sample paths.

Each replicate realizes one path lazily at the abscissae the method requests. Given
the realized values, the signed error I(f) - estimate is Gaussian with mean
trap(X, f(X)) - estimate (zero up to rounding) and variance trap_error_variance(X),
so it is drawn from that law instead of integrating the path.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..exceptions import InvalidInputError
from ..trapz.adaptrap import TrapConfig, adap_trap
from ..trapz.rules import composite_sum, trap_rule_nonuniform
from .laws import AverageCaseParams, trap_error_variance
from .trees import FullKAryTree, node_interval, tree_counts
from .wiener import LazyWienerPath, wiener_sample

logger = logging.getLogger(__name__)

SINGLE_NODE = FullKAryTree.single(2).canonical()


@dataclass
class StudyResult:
    """Tallies of one Monte Carlo study; errors and error_trees only cover terminated runs."""

    n_reps: int
    tau: float
    tree_histogram: Dict[str, int]
    errors: np.ndarray
    error_trees: List[str]
    cutoffs: int
    evaluations: List[int] = field(default_factory=list)

    @property
    def cutoff_rate(self) -> float:
        return self.cutoffs / self.n_reps

    def frequency(self, canonical: str) -> Tuple[float, float]:
        """Empirical probability of a tree shape and its standard error."""
        p = self.tree_histogram.get(canonical, 0) / self.n_reps
        return p, math.sqrt(p * (1 - p) / self.n_reps)

    def exceed_probability(self, threshold: float = None) -> Tuple[float, float]:
        """
        Empirical P(|error| > threshold) over all replicates and its standard error.
        Cut-off runs have no error and count as non-exceeding.
        """
        threshold = self.tau if threshold is None else threshold
        p = float(np.count_nonzero(np.abs(self.errors) > threshold)) / self.n_reps
        return p, math.sqrt(p * (1 - p) / self.n_reps)

    def conditional_error_variance(self, canonical: str) -> Tuple[float, float, int]:
        """Sample variance of the error given the tree shape, its standard error and the sample size."""
        mask = np.array([t == canonical for t in self.error_trees], dtype=bool)
        sample = self.errors[mask] if mask.size else np.array([])
        n = sample.size
        if n < 2:
            return math.nan, math.nan, n
        var = float(np.var(sample, ddof=1))
        return var, var * math.sqrt(2.0 / (n - 1)), n

    def to_dict(self) -> dict:
        return {
            "n_reps": self.n_reps,
            "tau": self.tau,
            "tree_histogram": tree_counts(self.tree_histogram),
            "cutoffs": self.cutoffs,
            "cutoff_rate": self.cutoff_rate,
            "n_errors": int(self.errors.size),
            "mean_evaluations": float(np.mean(self.evaluations)) if self.evaluations else 0.0,
        }


def mc_adaptrap_study(
    params: AverageCaseParams,
    n_reps: int,
    max_depth: int,
    rng: np.random.Generator,
) -> StudyResult:
    """
    Run the adaptive trapezoidal method on n_reps independent Wiener paths.

    Args:
        params: rho, m, k, tau and the prior the paths are drawn from
        n_reps: Number of replicates, >= 1
        max_depth: Recursion cutoff; runs reaching it are tallied as cutoffs
        rng: Seeded generator shared by all replicates in order

    Returns:
        StudyResult with the tree histogram, signed errors and cutoff count
    """
    if n_reps < 1:
        raise InvalidInputError(f"n_reps must be >= 1, got {n_reps}")
    prior = params.prior
    cfg = TrapConfig(rho=params.rho, m=params.m, k=params.k, max_depth=max_depth)
    histogram: Counter = Counter()
    errors: List[float] = []
    error_trees: List[str] = []
    evaluations: List[int] = []
    cutoffs = 0

    for rep in range(n_reps):
        path = LazyWienerPath(prior, rng)
        result = adap_trap(path, prior.a, prior.b, params.tau, cfg, stop_at_cutoff=True)
        evaluations.append(result.n_evals)
        if not result.terminated:
            cutoffs += 1
            continue
        shape = result.tree.canonical()
        histogram[shape] += 1
        X = np.array([x for x, _ in result.evaluations])
        y = np.array([v for _, v in result.evaluations])
        mean = trap_rule_nonuniform(X, y) - result.estimate
        sd = math.sqrt(trap_error_variance(X, prior.lam))
        errors.append(mean + sd * rng.standard_normal())
        error_trees.append(shape)

    logger.info(f"mc_adaptrap_study: tau={params.tau}, reps={n_reps}, cutoffs={cutoffs}, shapes={len(histogram)}")
    return StudyResult(
        n_reps=n_reps,
        tau=params.tau,
        tree_histogram=dict(histogram),
        errors=np.array(errors),
        error_trees=error_trees,
        cutoffs=cutoffs,
        evaluations=evaluations,
    )


def local_error_estimate(values: np.ndarray, width: float) -> float:
    """Q2 - Q1 from the 2m + 1 equally spaced values of one node."""
    return composite_sum(list(values), width) - composite_sum(list(values[::2]), width)


def error_independence_check(
    params: AverageCaseParams,
    x_outside: float,
    n_reps: int,
    rng: np.random.Generator,
    node: Tuple[int, int] = (1, 1),
) -> Tuple[float, float]:
    """
    Sample correlation between the local error estimate of a node and the path value
    at a point outside that node's interval.

    Returns:
        (correlation, standard error 1 / sqrt(n_reps))
    """
    prior = params.prior
    left, right = node_interval(node, prior.a, prior.b, params.k)
    if left <= x_outside <= right:
        raise InvalidInputError(f"x_outside={x_outside} lies inside [{left}, {right}]")
    local = left + (right - left) * np.arange(2 * params.m + 1) / (2 * params.m)
    grid = np.union1d(local, [x_outside])
    positions = np.searchsorted(grid, local)
    outside = int(np.searchsorted(grid, x_outside))
    estimates = np.empty(n_reps)
    values = np.empty(n_reps)
    for rep in range(n_reps):
        path = wiener_sample(grid, prior, rng)
        estimates[rep] = local_error_estimate(path[positions], right - left)
        values[rep] = path[outside]
    corr = float(np.corrcoef(estimates, values)[0, 1])
    return corr, 1.0 / math.sqrt(n_reps)
