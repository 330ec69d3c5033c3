from .external import ExternalIntegrand, external_integrand, format_request, parse_response
from .metrics import bump_density_ratio, covers, mean_and_se, mse_bound, relative_error
from .records import RunRecord, config_hash, read_csv, read_json, write_csv, write_json
from .reparam import gaussian_reparam
from .runners import (
    run_adaptrap,
    run_avgcase_validation,
    run_bc_experiment,
    run_illustration,
    run_robot_analogue,
    run_synthetic_assessment,
)
from .schema import ExperimentConfig, load_config

__all__ = [
    "ExperimentConfig",
    "ExternalIntegrand",
    "RunRecord",
    "bump_density_ratio",
    "config_hash",
    "covers",
    "external_integrand",
    "format_request",
    "gaussian_reparam",
    "load_config",
    "mean_and_se",
    "mse_bound",
    "parse_response",
    "read_csv",
    "read_json",
    "relative_error",
    "run_adaptrap",
    "run_avgcase_validation",
    "run_bc_experiment",
    "run_illustration",
    "run_robot_analogue",
    "run_synthetic_assessment",
    "write_csv",
    "write_json",
]
