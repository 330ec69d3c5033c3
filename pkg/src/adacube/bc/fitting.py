"""
Empirical-Bayes hyperparameter fitting: maximize log p(D | theta) - r(theta) over the
unconstrained vector (c, log sigma, alphas) with BFGS and central finite differences.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from ..exceptions import AdacubeError, FittingError, InvalidInputError
from ..gp.conditioned import log_marginal_likelihood
from ..gp.dataset import Dataset
from ..kernels.product import ProductKernelSpec

logger = logging.getLogger(__name__)

Penalty = Callable[[ProductKernelSpec], float]


@dataclass
class FitOutcome:
    spec: ProductKernelSpec
    objective: float
    init_objective: float
    n_iter: int
    n_evals: int
    message: str


class EmpiricalBayesFitter:
    def __init__(self, penalty: Penalty, maxiter: int = 200, gtol: float = 1e-5, fd_step: float = 1e-6):
        """
        Args:
            penalty: r(theta), subtracted from the log marginal likelihood
            maxiter: BFGS iteration cap
            gtol: Stop when the gradient max-norm falls below this
            fd_step: Relative step of the central differences
        """
        self.penalty = penalty
        self.maxiter = maxiter
        self.gtol = gtol
        self.fd_step = fd_step

    def objective(self, spec: ProductKernelSpec, data: Dataset) -> float:
        """log p(D | theta) - r(theta); -inf where the model cannot be evaluated."""
        try:
            value = log_marginal_likelihood(spec, data) - self.penalty(spec)
        except (AdacubeError, FloatingPointError, OverflowError) as e:
            logger.debug(f"objective undefined: {e}")
            return -math.inf
        return value if math.isfinite(value) else -math.inf

    def fit(self, data: Dataset, init: ProductKernelSpec) -> FitOutcome:
        if data.n == 0:
            raise InvalidInputError("cannot fit hyperparameters without data")
        v0 = init.to_vector()
        best = {"value": math.inf, "v": v0.copy()}
        counter = {"evals": 0}

        def loss(v: np.ndarray) -> float:
            counter["evals"] += 1
            try:
                spec = init.with_vector(v)
            except AdacubeError:
                return math.inf
            value = -self.objective(spec, data)
            if value < best["value"]:
                best["value"] = value
                best["v"] = np.array(v, copy=True)
            return value

        def gradient(v: np.ndarray) -> np.ndarray:
            grad = np.empty_like(v)
            for i in range(v.size):
                h = self.fd_step * max(1.0, abs(v[i]))
                up = v.copy()
                down = v.copy()
                up[i] += h
                down[i] -= h
                grad[i] = (loss(up) - loss(down)) / (2 * h)
            # an undefined neighbour leaves a non-finite slope; BFGS must not step along it
            grad[~np.isfinite(grad)] = 0.0
            return grad

        init_loss = loss(v0)
        if not math.isfinite(init_loss):
            raise FittingError("Error: Failed to evaluate the fitting objective at the initial hyperparameters")

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            res = minimize(loss, v0, jac=gradient, method="BFGS", options={"maxiter": self.maxiter, "gtol": self.gtol})

        spec = init.with_vector(best["v"])
        outcome = FitOutcome(
            spec=spec,
            objective=-best["value"],
            init_objective=-init_loss,
            n_iter=int(res.nit),
            n_evals=counter["evals"],
            message=str(res.message),
        )
        logger.debug(f"fit_theta_eb: objective {outcome.init_objective:.6g} -> {outcome.objective:.6g} in {outcome.n_iter} iterations")
        return outcome


def fit_theta_eb(data: Dataset, init: ProductKernelSpec, reg: Penalty, **options) -> ProductKernelSpec:
    """
    Penalized marginal-likelihood fit of theta, warm-started at init.

    Args:
        data: Non-empty dataset
        init: Starting hyperparameters; their structure (field kinds, knots) is kept
        reg: Penalty r(theta)
        options: maxiter, gtol, fd_step

    Returns:
        The best hyperparameters found
    """
    return EmpiricalBayesFitter(reg, **options).fit(data, init).spec
