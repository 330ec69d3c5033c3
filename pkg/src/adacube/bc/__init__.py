from .candidates import GridCandidates, MidpointCandidates, candidate_set_1d, candidate_set_grid, product_grid, scheduled_count
from .fitting import EmpiricalBayesFitter, FitOutcome, fit_theta_eb
from .mcmc import MCMCConfig, MCMCResult, metropolis, scale_schedule
from .models import EmpiricalBayesModel, FullBayesModel, SurrogateModel, total_variance_estimate
from .regularizer import LinearLengthscalePenalty, Regularizer, regularizer_value
from .runners import adap_bc, e_adap_bc, run_bc, std_bc
from .settings import BCSettings
from .state import BCRecord, BCTrace, Method, StopReason, StopRule

__all__ = [
    "BCRecord",
    "BCSettings",
    "BCTrace",
    "EmpiricalBayesFitter",
    "EmpiricalBayesModel",
    "FitOutcome",
    "FullBayesModel",
    "SurrogateModel",
    "GridCandidates",
    "LinearLengthscalePenalty",
    "MCMCConfig",
    "MCMCResult",
    "Method",
    "MidpointCandidates",
    "Regularizer",
    "StopReason",
    "StopRule",
    "adap_bc",
    "candidate_set_1d",
    "candidate_set_grid",
    "e_adap_bc",
    "fit_theta_eb",
    "metropolis",
    "product_grid",
    "regularizer_value",
    "run_bc",
    "scale_schedule",
    "scheduled_count",
    "std_bc",
    "total_variance_estimate",
]
