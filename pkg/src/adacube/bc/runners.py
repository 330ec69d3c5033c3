"""Entry points of the three sequential cubature methods."""

import logging
from typing import Callable, Optional

import numpy as np

from ..exceptions import EvaluationError, InvalidInputError
from ..gp.dataset import Dataset
from .graph.graph_builder import GraphBuilder
from .models import total_variance_estimate
from .settings import BCSettings
from .state import BCTrace, Method, StopRule

logger = logging.getLogger(__name__)


def run_bc(
    method: Method,
    f: Callable,
    D0: Dataset,
    stop: StopRule,
    settings: Optional[BCSettings] = None,
    rng: Optional[np.random.Generator] = None,
) -> BCTrace:
    """
    Run one sequential cubature loop to its stopping point.

    Args:
        method: StdBC, EAdapBC or AdapBC
        f: Integrand
        D0: Non-empty initial design with its values
        stop: Tolerance and/or evaluation budget (D0 counts toward the budget)
        settings: Model and sampler settings
        rng: Generator; seeded from settings.seed when None

    Returns:
        BCTrace

    Raises:
        EvaluationError: The integrand failed; the trace so far is attached as partial_trace
    """
    method = Method(method)
    if D0.n == 0:
        raise InvalidInputError("the initial design must not be empty")
    builder = GraphBuilder(f, D0, stop, settings, rng)
    graph = builder.setup_graph(method)
    logger.info(f"{method.value}: starting from {D0.n} points, tau={stop.tau}, budget={stop.budget}")
    state = graph.invoke({"data": D0, "records": []}, config={"recursion_limit": builder.recursion_limit()})

    trace = BCTrace(
        method=method,
        records=list(state.get("records", [])),
        final=state["final"],
        stopped_by=state.get("stopped_by"),
        data=state["data"],
        spec=state.get("spec"),
        theta_samples=state.get("theta_samples"),
    )
    error = state.get("error")
    if error is not None:
        raise EvaluationError(str(error), abscissa=error.abscissa, partial_trace=trace) from error
    return trace


def e_adap_bc(f: Callable, D0: Dataset, stop: StopRule, settings: Optional[BCSettings] = None, rng=None) -> BCTrace:
    """Empirical-Bayes adaptive cubature with nonstationary lengthscale fields."""
    return run_bc(Method.E_ADAP_BC, f, D0, stop, settings, rng)


def std_bc(f: Callable, D0: Dataset, stop: StopRule, settings: Optional[BCSettings] = None, rng=None) -> BCTrace:
    """As e_adap_bc with one constant lengthscale per axis."""
    return run_bc(Method.STD_BC, f, D0, stop, settings, rng)


def adap_bc(f: Callable, D0: Dataset, stop: StopRule, settings: Optional[BCSettings] = None, rng=None) -> BCTrace:
    """Full-Bayes adaptive cubature; settings carry the prior, the sampler and M, K, J."""
    return run_bc(Method.ADAP_BC, f, D0, stop, settings, rng)


__all__ = ["adap_bc", "e_adap_bc", "run_bc", "std_bc", "total_variance_estimate"]
