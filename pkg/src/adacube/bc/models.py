"""
Surrogate strategies behind the acquisition graph. The empirical-Bayes model fits one
theta per iteration; the full-Bayes model carries a chain of theta draws instead.
"""

import logging
import math
from typing import Callable, Protocol

import numpy as np
from scipy.stats import norm

from ..embeddings.cache import EmbeddingCache
from ..embeddings.posterior import PosteriorIntegral, augmented_variances, posterior_integral
from ..exceptions import AdacubeError, InvalidInputError, SamplingError
from ..gp.conditioned import ConditionedGP, log_marginal_likelihood, sample_paths
from ..gp.dataset import Dataset
from ..kernels.product import ProductKernelSpec
from .fitting import EmpiricalBayesFitter
from .mcmc import MCMCConfig, MCMCResult, metropolis, scale_schedule
from .state import BCState

logger = logging.getLogger(__name__)


def total_variance_estimate(per_theta_means, per_theta_vars) -> float:
    """
    mean(vars) + (1/K) sum (means - mean(means))^2.

    Args:
        per_theta_means: E[I | theta_k, D] for K draws
        per_theta_vars: V[I | theta_k, D] for the same draws

    Returns:
        Estimate of V[I | D]
    """
    means = np.asarray(per_theta_means, dtype=float).reshape(-1)
    variances = np.asarray(per_theta_vars, dtype=float).reshape(-1)
    if means.size == 0 or means.size != variances.size:
        raise InvalidInputError(f"need equally many means and variances, at least one; got {means.size} and {variances.size}")
    return float(np.mean(variances) + np.mean((means - means.mean()) ** 2))


class SurrogateModel(Protocol):
    def refresh(self, state: BCState) -> dict: ...

    def scores(self, state: BCState, candidates: np.ndarray) -> np.ndarray: ...

    def summarize(self, state: BCState, data: Dataset) -> PosteriorIntegral: ...

    def finalize(self, state: BCState) -> dict: ...


class EmpiricalBayesModel:
    """theta_n = argmax log p(D | theta) - r(theta), warm-started; E(x) is the closed-form augmented variance."""

    def __init__(self, init: ProductKernelSpec, fitter: EmpiricalBayesFitter, cache: EmbeddingCache, refit_every: int = 1, frozen: bool = False):
        self.init = init
        self.fitter = fitter
        self.cache = cache
        self.refit_every = refit_every
        # frozen: init is used as given and never refitted
        self.frozen = frozen

    def refresh(self, state: BCState) -> dict:
        data = state["data"]
        n = len(state.get("records", []))
        spec = state.get("spec")
        if self.frozen:
            spec = self.init
        elif spec is None or n % self.refit_every == 0:
            outcome = self.fitter.fit(data, spec or self.init)
            spec = outcome.spec
            logger.info(f"theta fitted on {data.n} points, objective {outcome.objective:.6g}")
        return {"spec": spec, "current": posterior_integral(spec, data, self.cache)}

    def scores(self, state: BCState, candidates: np.ndarray) -> np.ndarray:
        return augmented_variances(state["spec"], state["data"], self.cache, candidates)

    def summarize(self, state: BCState, data: Dataset) -> PosteriorIntegral:
        return posterior_integral(state["spec"], data, self.cache)

    def finalize(self, state: BCState) -> dict:
        return {"final": state["current"]}


class FullBayesModel:
    """theta is marginalized by Metropolis draws under a Gaussian prior on the unconstrained vector."""

    def __init__(
        self,
        init: ProductKernelSpec,
        cache: EmbeddingCache,
        rng: np.random.Generator,
        burn_in: int = 1000,
        thin: int = 5,
        schedule: Callable[[int], float] = scale_schedule,
        prior_mean: float = -1.0,
        prior_var: float = 2.0,
        M: int = 8,
        K: int = 8,
        J: int = 50,
    ):
        """
        Args:
            init: Starting hyperparameters and model structure
            cache: Embedding memo (double integrals usually on the grid)
            rng: Generator for fantasies and chain seeds
            burn_in: Discarded steps per chain
            thin: Keep every thin-th step
            schedule: Proposal scale as a function of the acquisition count
            prior_mean: Mean of every coordinate of theta under the prior
            prior_var: Variance of every coordinate
            M: Fantasy paths per candidate
            K: theta draws per fantasized dataset
            J: theta draws for the final summary
        """
        self.init = init
        self.cache = cache
        self.rng = rng
        self.burn_in = burn_in
        self.thin = thin
        self.schedule = schedule
        self.prior_mean = prior_mean
        self.prior_sd = math.sqrt(prior_var)
        self.M = M
        self.K = K
        self.J = J

    def log_posterior(self, data: Dataset) -> Callable[[np.ndarray], float]:
        def target(v: np.ndarray) -> float:
            try:
                value = log_marginal_likelihood(self.init.with_vector(v), data)
            except (AdacubeError, FloatingPointError, OverflowError):
                return -math.inf
            return value + float(np.sum(norm.logpdf(v, loc=self.prior_mean, scale=self.prior_sd)))

        return target

    def chain(self, data: Dataset, start: np.ndarray, draws: int, n: int) -> MCMCResult:
        cfg = MCMCConfig(
            steps=self.burn_in + self.thin * draws,
            burn_in=self.burn_in,
            thin=self.thin,
            scale=self.schedule(n),
            seed=int(self.rng.integers(2**62)),
        )
        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                return metropolis(self.log_posterior(data), start, cfg)
        except InvalidInputError as e:
            raise SamplingError(f"Error: Failed to start the theta chain on {data.n} points: {e}") from e

    def mixture(self, samples: np.ndarray, data: Dataset) -> PosteriorIntegral:
        laws = [posterior_integral(self.init.with_vector(v), data, self.cache) for v in samples]
        means = [p.mu for p in laws]
        variance = total_variance_estimate(means, [p.variance for p in laws])
        return PosteriorIntegral(mu=float(np.mean(means)), sigma=math.sqrt(max(variance, 0.0)), n=data.n)

    def _start(self, state: BCState) -> np.ndarray:
        start = state.get("chain_start")
        return start if start is not None else self.init.to_vector()

    def refresh(self, state: BCState) -> dict:
        data = state["data"]
        n = len(state.get("records", []))
        result = self.chain(data, self._start(state), self.K, n)
        logger.debug(f"theta chain on {data.n} points: acceptance {result.acceptance_rate:.3f}")
        return {
            "theta_samples": result.chain,
            "chain_start": result.last,
            "spec": self.init.with_vector(result.last),
            "current": self.mixture(result.chain, data),
        }

    def fantasy_variance(self, state: BCState, x: np.ndarray) -> float:
        """E(x) averaged over M fantasized observations at x."""
        data = state["data"]
        samples = state["theta_samples"]
        n = len(state.get("records", []))
        estimates = []
        for _ in range(self.M):
            theta = samples[self.rng.integers(samples.shape[0])]
            gp = ConditionedGP(self.init.with_vector(theta), data)
            value = float(sample_paths(gp, x.reshape(1, -1), 1, self.rng)[0, 0])
            fantasy = data.append(x, value)
            result = self.chain(fantasy, state["chain_start"], self.K, n)
            estimates.append(self.mixture(result.chain, fantasy).variance)
        return float(np.mean(estimates))

    def scores(self, state: BCState, candidates: np.ndarray) -> np.ndarray:
        return np.array([self.fantasy_variance(state, x) for x in candidates])

    def summarize(self, state: BCState, data: Dataset) -> PosteriorIntegral:
        return self.mixture(state["theta_samples"], data)

    def finalize(self, state: BCState) -> dict:
        data = state["data"]
        n = len(state.get("records", []))
        result = self.chain(data, self._start(state), self.J, n)
        return {"final": self.mixture(result.chain, data), "theta_samples": result.chain, "chain_start": result.last}
