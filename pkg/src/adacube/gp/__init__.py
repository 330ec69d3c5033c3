from .conditioned import (
    ConditionedGP,
    condition,
    credible_band,
    log_marginal_likelihood,
    posterior_cov,
    posterior_mean,
    posterior_var_diag,
    sample_paths,
)
from .dataset import Dataset

__all__ = [
    "ConditionedGP",
    "Dataset",
    "condition",
    "credible_band",
    "log_marginal_likelihood",
    "posterior_cov",
    "posterior_mean",
    "posterior_var_diag",
    "sample_paths",
]
