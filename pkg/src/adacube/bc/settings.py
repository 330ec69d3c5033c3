from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np

from ..config.configfile import Config
from ..embeddings.cache import DoubleIntegralMethod
from ..exceptions import InvalidInputError
from ..gp.dataset import Dataset
from ..kernels.lengthscale import FieldKind
from ..kernels.product import DEFAULT_JITTER, ProductKernelSpec
from ..kernels.radial import RadialBasis


@dataclass(frozen=True)
class BCSettings:
    """
    Model, fitting, candidate and sampler settings shared by the three cubature loops.

    A non-None theta fixes the hyperparameters of StdBC and EAdapBC for the whole run.
    """

    rbf: RadialBasis = RadialBasis()
    field_kind: FieldKind = FieldKind.PIECEWISE_LINEAR
    n_knots: int = 11
    n_cells: int = 10
    jitter: float = DEFAULT_JITTER
    init_lengthscale: float = 0.2
    lambda1: float = 30.0
    lambda2: float = 1.0
    std_penalty: float = 0.0
    grid: Optional[Sequence[Sequence[float]]] = None
    K1: int = 500
    bfgs_maxiter: int = 200
    bfgs_gtol: float = 1e-5
    fd_step: float = 1e-6
    refit_every: int = 1
    double_method: Optional[DoubleIntegralMethod] = None
    grid_n: int = 101
    burn_in: int = 1000
    thin: int = 5
    scale_start: float = 0.3
    scale_slope: float = 0.007
    scale_floor: float = 0.01
    prior_mean: float = -1.0
    prior_var: float = 2.0
    M: int = 8
    K: int = 8
    J: int = 50
    seed: int = 0
    theta: Optional[ProductKernelSpec] = None

    def __post_init__(self):
        if self.refit_every < 1:
            raise InvalidInputError(f"refit_every must be >= 1, got {self.refit_every}")
        if min(self.M, self.K, self.J) < 1:
            raise InvalidInputError("M, K and J must be >= 1")
        if not self.init_lengthscale > 0:
            raise InvalidInputError(f"init_lengthscale must be positive, got {self.init_lengthscale}")
        if not self.prior_var > 0:
            raise InvalidInputError(f"prior_var must be positive, got {self.prior_var}")

    @classmethod
    def from_config(cls, config: Optional[Config] = None, **overrides) -> "BCSettings":
        """Packaged defaults, then keyword overrides."""
        config = config or Config()
        model = config.get_model_options()
        bc = config.get_bc_options()
        mcmc = config.get_mcmc_options()
        values = {
            "rbf": RadialBasis(nu=model["nu"]),
            "field_kind": FieldKind(model["field_kind"]),
            "n_knots": model["knots"],
            "n_cells": model["constant_cells"],
            "jitter": model["jitter"],
            "lambda1": model["lambda1"],
            "lambda2": model["lambda2"],
            "K1": bc["candidates"],
            "bfgs_maxiter": bc["bfgs_maxiter"],
            "bfgs_gtol": bc["bfgs_gtol"],
            "fd_step": bc["fd_step"],
            "grid_n": bc["grid_n"],
            "burn_in": mcmc["burn_in"],
            "thin": mcmc["thin"],
            "scale_start": mcmc["scale_start"],
            "scale_slope": mcmc["scale_slope"],
            "scale_floor": mcmc["scale_floor"],
            "prior_mean": mcmc["prior_mean"],
            "prior_var": mcmc["prior_var"],
            "M": mcmc["M"],
            "K": mcmc["K"],
            "J": mcmc["J"],
        }
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise InvalidInputError(f"unknown settings: {sorted(unknown)}")
        values.update(overrides)
        return cls(**values)

    def with_overrides(self, **overrides) -> "BCSettings":
        return replace(self, **overrides)

    def initial_spec(self, data: Dataset, kind: Optional[FieldKind] = None) -> ProductKernelSpec:
        """Starting hyperparameters: c at the data mean, sigma at the data spread, flat lengthscales."""
        y = data.y
        spread = float(np.std(y)) if y.size > 1 else 0.0
        return ProductKernelSpec.default(
            data.d,
            kind=kind or self.field_kind,
            rbf=self.rbf,
            c=float(np.mean(y)),
            sigma=spread if spread > 0 else 1.0,
            lengthscale=self.init_lengthscale,
            n_knots=self.n_knots,
            n_cells=self.n_cells,
            jitter=self.jitter,
        )
