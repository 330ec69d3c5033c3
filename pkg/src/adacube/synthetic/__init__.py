from .integrand import (
    FIXTURE_INTEGRALS,
    FIXTURES,
    SyntheticParams,
    as_evaluator,
    axis_integral,
    bump,
    eval_integrand,
    fixture,
    reference_integral,
    sample_many,
    sample_params,
)

__all__ = [
    "FIXTURE_INTEGRALS",
    "FIXTURES",
    "SyntheticParams",
    "as_evaluator",
    "axis_integral",
    "bump",
    "eval_integrand",
    "fixture",
    "reference_integral",
    "sample_many",
    "sample_params",
]
