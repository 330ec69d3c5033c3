import logging
from typing import Callable, Optional

import numpy as np
from langgraph.graph import END, START, StateGraph

from ...embeddings.cache import DoubleIntegralMethod, EmbeddingCache
from ...exceptions import InvalidInputError
from ...gp.dataset import Dataset
from ...kernels.lengthscale import FieldKind
from ..candidates import GridCandidates, MidpointCandidates
from ..fitting import EmpiricalBayesFitter
from ..mcmc import scale_schedule
from ..models import EmpiricalBayesModel, FullBayesModel
from ..nodes import AcquireNode, EvaluateNode, FinalizeNode, FitNode
from ..regularizer import LinearLengthscalePenalty, Regularizer
from ..settings import BCSettings
from ..state import BCState, Method, StopRule

logger = logging.getLogger(__name__)


class GraphBuilder:
    def __init__(
        self,
        evaluator: Callable,
        D0: Dataset,
        stop: StopRule,
        settings: Optional[BCSettings] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        """
        Args:
            evaluator: The integrand; takes a float in d = 1 and a point array otherwise
            D0: Initial design
            stop: Tolerance and/or budget
            settings: Model, fitting and sampler settings
            rng: Generator for candidate sampling and the sampler; seeded from settings when None
        """
        self.evaluator = evaluator
        self.D0 = D0
        self.stop = stop
        self.settings = settings or BCSettings()
        self.rng = rng if rng is not None else np.random.default_rng(self.settings.seed)
        self.graph_builder = StateGraph(BCState)
        self.model = None

    def _cache(self, default: DoubleIntegralMethod) -> EmbeddingCache:
        s = self.settings
        return EmbeddingCache(grid=s.grid, double_method=s.double_method or default, grid_n=s.grid_n)

    def _candidates(self):
        s = self.settings
        if s.grid is not None:
            return GridCandidates(s.grid, s.K1, self.rng)
        if self.D0.d != 1:
            raise InvalidInputError(f"a candidate grid is required in d = {self.D0.d}")
        return MidpointCandidates()

    def _init(self, kind: Optional[FieldKind] = None):
        """Starting hyperparameters and whether they stay fixed for the whole run."""
        s = self.settings
        if s.theta is None:
            return s.initial_spec(self.D0, kind), False
        if s.theta.d != self.D0.d:
            raise InvalidInputError(f"fixed theta has {s.theta.d} lengthscale fields, the design is {self.D0.d}-dimensional")
        return s.theta, True

    def _fitter(self, penalty) -> EmpiricalBayesFitter:
        s = self.settings
        return EmpiricalBayesFitter(penalty, maxiter=s.bfgs_maxiter, gtol=s.bfgs_gtol, fd_step=s.fd_step)

    def std_bc_model(self) -> EmpiricalBayesModel:
        """Constant lengthscale per axis with the linear lengthscale penalty."""
        s = self.settings
        init, frozen = self._init(FieldKind.CONSTANT)
        return EmpiricalBayesModel(
            init,
            self._fitter(LinearLengthscalePenalty(s.std_penalty)),
            self._cache(DoubleIntegralMethod.QUADRATURE),
            refit_every=s.refit_every,
            frozen=frozen,
        )

    def e_adap_bc_model(self) -> EmpiricalBayesModel:
        s = self.settings
        init, frozen = self._init()
        return EmpiricalBayesModel(
            init,
            self._fitter(Regularizer(s.lambda1, s.lambda2)),
            self._cache(DoubleIntegralMethod.QUADRATURE),
            refit_every=s.refit_every,
            frozen=frozen,
        )

    def adap_bc_model(self) -> FullBayesModel:
        s = self.settings
        return FullBayesModel(
            s.initial_spec(self.D0),
            self._cache(DoubleIntegralMethod.GRID),
            self.rng,
            burn_in=s.burn_in,
            thin=s.thin,
            schedule=lambda n: scale_schedule(n, s.scale_start, s.scale_slope, s.scale_floor),
            prior_mean=s.prior_mean,
            prior_var=s.prior_var,
            M=s.M,
            K=s.K,
            J=s.J,
        )

    def _route(self, proceed: str):
        def route(state: BCState) -> str:
            if state.get("error") is not None:
                return "finalize"
            if self.stop.reason(state["current"], state["data"].n) is not None:
                return "finalize"
            return proceed

        return route

    def sequential_build_graph(self, model):
        """
        Build the acquisition loop:
        fit -> (stop ? finalize : acquire) -> evaluate -> (stop ? finalize : fit).
        """
        try:
            self.model = model
            candidates = self._candidates()

            self.graph_builder.add_node("fit", FitNode(model).process)
            self.graph_builder.add_node("acquire", AcquireNode(model, candidates).process)
            self.graph_builder.add_node("evaluate", EvaluateNode(model, self.evaluator).process)
            self.graph_builder.add_node("finalize", FinalizeNode(model, self.stop).process)

            self.graph_builder.add_edge(START, "fit")
            self.graph_builder.add_conditional_edges("fit", self._route("acquire"), {"acquire": "acquire", "finalize": "finalize"})
            self.graph_builder.add_edge("acquire", "evaluate")
            self.graph_builder.add_conditional_edges("evaluate", self._route("fit"), {"fit": "fit", "finalize": "finalize"})
            self.graph_builder.add_edge("finalize", END)
        except InvalidInputError:
            raise
        except Exception as e:
            raise ValueError(f"Error: Failed to build the acquisition graph: {e}")

    def setup_graph(self, method: Method):
        """Setup the graph for a cubature method."""
        method = Method(method)
        if method == Method.STD_BC:
            self.sequential_build_graph(self.std_bc_model())
        elif method == Method.E_ADAP_BC:
            self.sequential_build_graph(self.e_adap_bc_model())
        elif method == Method.ADAP_BC:
            self.sequential_build_graph(self.adap_bc_model())

        logger.info(f"{method.value} graph built for d = {self.D0.d}")
        return self.graph_builder.compile()

    def recursion_limit(self) -> int:
        """Graph steps needed to reach the evaluation cap: three per acquisition plus fit and finalize."""
        return 3 * max(self.stop.cap - self.D0.n, 0) + 10
