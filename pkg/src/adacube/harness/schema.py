"""Experiment configuration files: JSON validated against these models, unknown keys rejected."""

import json
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..bc.settings import BCSettings
from ..config.configfile import Config
from ..embeddings.cache import DoubleIntegralMethod
from ..exceptions import ConfigError
from ..kernels.lengthscale import FieldKind
from ..kernels.radial import RadialBasis
from ..synthetic.integrand import FIXTURES, SyntheticParams, fixture, sample_params
from ..trapz.adaptrap import TrapConfig

_DEFAULTS = Config()
_MODEL = _DEFAULTS.get_model_options()
_BC = _DEFAULTS.get_bc_options()
_MCMC = _DEFAULTS.get_mcmc_options()
_TRAP = _DEFAULTS.get_trap_options()
_HARNESS = _DEFAULTS.get_harness_options()

MethodName = Literal["AdapTrap", "StdBC", "EAdapBC", "AdapBC"]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SyntheticSpec(Strict):
    C: List[float]
    R: List[float]
    H: List[float]
    F: List[float]
    P: List[int]

    def to_params(self) -> SyntheticParams:
        return SyntheticParams(C=self.C, R=self.R, H=self.H, F=self.F, P=self.P)


class IntegrandConfig(Strict):
    """Exactly one of a named fixture, explicit parameters, a seeded random draw or an external command."""

    fixture: Optional[str] = None
    synthetic: Optional[SyntheticSpec] = None
    random_d: Optional[int] = Field(default=None, ge=1)
    command: Optional[List[str]] = None
    gaussian: bool = False

    @model_validator(mode="after")
    def _exactly_one(self):
        given = [name for name in ("fixture", "synthetic", "random_d", "command") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"give exactly one of fixture, synthetic, random_d, command; got {given or 'none'}")
        if self.fixture is not None and self.fixture not in FIXTURES:
            raise ValueError(f"unknown fixture {self.fixture!r}; choose from {sorted(FIXTURES)}")
        return self

    def params(self, seed: int) -> Optional[SyntheticParams]:
        """Synthetic parameters, or None for an external integrand."""
        if self.fixture is not None:
            return fixture(self.fixture)
        if self.synthetic is not None:
            return self.synthetic.to_params()
        if self.random_d is not None:
            return sample_params(self.random_d, np.random.default_rng(seed), seed=seed)
        return None


class ModelConfig(Strict):
    nu: float = _MODEL["nu"]
    field_kind: FieldKind = FieldKind(_MODEL["field_kind"])
    knots: int = Field(default=_MODEL["knots"], ge=2)
    cells: int = Field(default=_MODEL["constant_cells"], ge=1)
    jitter: float = Field(default=_MODEL["jitter"], gt=0)
    lambda1: Optional[float] = Field(default=None, ge=0)
    lambda2: Optional[float] = Field(default=None, ge=0)
    std_penalty: Optional[float] = Field(default=None, ge=0)
    init_lengthscale: float = Field(default=0.2, gt=0)
    refit_every: int = Field(default=1, ge=1)
    grid_n: int = Field(default=_BC["grid_n"], ge=2)
    double_method: Optional[DoubleIntegralMethod] = None
    candidates: int = Field(default=_BC["candidates"], ge=1)
    grid_divisions: Optional[int] = Field(default=None, ge=2)
    bfgs_maxiter: int = Field(default=_BC["bfgs_maxiter"], ge=1)
    bfgs_gtol: float = Field(default=_BC["bfgs_gtol"], gt=0)
    fd_step: float = Field(default=_BC["fd_step"], gt=0)

    def penalties(self, d: int, robot: bool = False) -> tuple:
        """(lambda1, lambda2, std_penalty), unset values taken from the packaged defaults for the setting."""
        if d == 1:
            defaults = (_MODEL["lambda1"], _MODEL["lambda2"], 0.0)
        elif robot:
            defaults = (_MODEL["lambda1_robot"], _MODEL["lambda2_robot"], _MODEL["std_penalty_multi"])
        else:
            defaults = (_MODEL["lambda1_multi"], _MODEL["lambda2_multi"], _MODEL["std_penalty_multi"])
        given = (self.lambda1, self.lambda2, self.std_penalty)
        return tuple(default if value is None else value for value, default in zip(given, defaults))


class MCMCSettings(Strict):
    burn_in: int = Field(default=_MCMC["burn_in"], ge=0)
    thin: int = Field(default=_MCMC["thin"], ge=1)
    scale_start: float = Field(default=_MCMC["scale_start"], gt=0)
    scale_slope: float = Field(default=_MCMC["scale_slope"], ge=0)
    scale_floor: float = Field(default=_MCMC["scale_floor"], gt=0)
    prior_mean: float = _MCMC["prior_mean"]
    prior_var: float = Field(default=_MCMC["prior_var"], gt=0)
    M: int = Field(default=_MCMC["M"], ge=1)
    K: int = Field(default=_MCMC["K"], ge=1)
    J: int = Field(default=_MCMC["J"], ge=1)


class TrapSettings(Strict):
    rho: float = Field(default=_TRAP["rho"], gt=0)
    m: int = Field(default=_TRAP["m"], ge=1)
    k: int = Field(default=_TRAP["k"], ge=2)
    max_depth: int = Field(default=_TRAP["max_depth"], ge=0)
    memoise: bool = _TRAP["memoise"]
    taus: List[float] = Field(default_factory=lambda: [0.06, 0.04, 0.02])

    def to_config(self) -> TrapConfig:
        return TrapConfig(rho=self.rho, m=self.m, k=self.k, max_depth=self.max_depth, memoise=self.memoise)


class StopConfig(Strict):
    tau: Optional[float] = Field(default=None, gt=0)
    budget: Optional[int] = Field(default=None, ge=1)


class Variant(Strict):
    """A model variant of a benchmark sweep."""

    nu: Optional[float] = None
    field_kind: Optional[FieldKind] = None

    def label(self, method: str) -> str:
        parts = [f"nu={self.nu}" if self.nu is not None else None, self.field_kind.value if self.field_kind else None]
        tag = ",".join(p for p in parts if p)
        return f"{method}[{tag}]" if tag else method


class StudyConfig(Strict):
    """Ensemble and validation sizes."""

    d: int = Field(default=1, ge=1)
    n_integrands: int = Field(default=20, ge=1)
    methods: List[MethodName] = Field(default_factory=lambda: ["StdBC", "EAdapBC"])
    variants: List[Variant] = Field(default_factory=list)
    initial_points: int = Field(default=11, ge=2)
    n_reps: int = Field(default=10_000, ge=1)
    avg_max_depth: int = Field(default=25, ge=1)
    holdout: int = Field(default=264, ge=1)
    functions: List[str] = Field(default_factory=lambda: ["z1", "z2", "z1_sq", "z2_sq"])
    plot_grid: int = Field(default=_HARNESS["plot_grid"], ge=2)


class ExperimentConfig(Strict):
    method: MethodName = "EAdapBC"
    integrand: IntegrandConfig = Field(default_factory=lambda: IntegrandConfig(fixture="illustration"))
    model: ModelConfig = Field(default_factory=ModelConfig)
    mcmc: MCMCSettings = Field(default_factory=MCMCSettings)
    trap: TrapSettings = Field(default_factory=TrapSettings)
    stop: StopConfig = Field(default_factory=lambda: StopConfig(budget=40))
    study: StudyConfig = Field(default_factory=StudyConfig)
    seed: int = Field(default=0, ge=0)
    out: str = "results"
    include_timing: bool = False
    eval_timeout: float = Field(default=_HARNESS["eval_timeout"], gt=0)
    eval_retries: int = Field(default=_HARNESS["eval_retries"], ge=0)

    def bc_settings(self, d: int, robot: bool = False, **overrides) -> BCSettings:
        """Settings of the cubature loops; a grid is set up whenever d > 1 or grid_divisions is given."""
        m = self.model
        lambda1, lambda2, std_penalty = m.penalties(d, robot)
        grid = None
        if d > 1 or m.grid_divisions is not None:
            divisions = m.grid_divisions or 40
            grid = [[i / divisions for i in range(divisions + 1)] for _ in range(d)]
        values = dict(
            rbf=RadialBasis(nu=m.nu),
            field_kind=m.field_kind,
            n_knots=m.knots,
            n_cells=m.cells,
            jitter=m.jitter,
            init_lengthscale=m.init_lengthscale,
            lambda1=lambda1,
            lambda2=lambda2,
            std_penalty=std_penalty,
            grid=grid,
            K1=m.candidates,
            bfgs_maxiter=m.bfgs_maxiter,
            bfgs_gtol=m.bfgs_gtol,
            fd_step=m.fd_step,
            refit_every=m.refit_every,
            double_method=m.double_method,
            grid_n=m.grid_n,
            seed=self.seed,
            **self.mcmc.model_dump(),
        )
        values.update(overrides)
        return BCSettings(**values)

    def with_overrides(self, seed=None, out=None, budget=None, tau=None) -> "ExperimentConfig":
        """Apply command-line overrides."""
        update = {}
        if seed is not None:
            update["seed"] = seed
        if out is not None:
            update["out"] = out
        if budget is not None or tau is not None:
            stop = self.stop.model_copy(update={k: v for k, v in (("budget", budget), ("tau", tau)) if v is not None})
            update["stop"] = stop
        return self.model_copy(update=update)


def load_config(path: Optional[Path]) -> ExperimentConfig:
    """Read and validate an experiment file; None gives the packaged defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return ExperimentConfig.model_validate(payload)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"Error: Failed to load experiment config {path}: {e}") from e
