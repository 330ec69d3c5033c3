"""Experiment runners behind the command line: each returns RunRecords and writes them under cfg.out."""

import logging
import math
import sys
import time
from collections import defaultdict
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..avgcase.laws import (
    AverageCaseParams,
    WienerPrior,
    alpha_i,
    nontermination_prob_k2,
    prob_height_at_most,
    prop1_lower_bound,
    single_node_error_variance,
)
from ..avgcase.study import SINGLE_NODE, mc_adaptrap_study
from ..bc.candidates import product_grid
from ..bc.runners import run_bc
from ..bc.state import BCTrace, Method, StopRule
from ..exceptions import ConfigError
from ..gp.conditioned import condition, credible_band
from ..gp.dataset import Dataset
from ..kernels.radial import RadialBasis
from ..synthetic.integrand import SyntheticParams, as_evaluator, reference_integral, sample_params
from ..trapz.adaptrap import adap_trap
from .external import external_integrand
from .metrics import bump_density_ratio, covers, mean_and_se, mse_bound, relative_error
from .records import RunRecord, config_hash
from .reparam import gaussian_reparam
from .schema import ExperimentConfig
from .surrogates import SURROGATES

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["n", "x", "y", "mu", "sigma", "abs_error", "z_score"]
BENCH_COLUMNS = ["method", "n", "mean_rel_err", "se", "coverage", "coverage_se", "count"]
AVGCASE_TAUS = (0.02, 0.05, 0.1)


def initial_design_1d(f: Callable, n_points: int) -> Dataset:
    """The n-point uniform grid {i / (n-1)} with its values."""
    xs = [i / (n_points - 1) for i in range(n_points)]
    return Dataset.from_1d(xs, [float(f(x)) for x in xs])


def initial_design_grid(f: Callable, axes: Sequence[Sequence[float]]) -> Dataset:
    X = product_grid(axes)
    return Dataset(X, [float(f(x)) for x in X])


def unit_grid(divisions: int, interior: bool = False) -> List[float]:
    """{i / divisions} for i = 0..divisions, or 1..divisions-1 when interior."""
    indices = range(1, divisions) if interior else range(divisions + 1)
    return [i / divisions for i in indices]


def trace_rows(trace: BCTrace, D0_size: int, truth: Optional[float], include_timing: bool = False) -> List[dict]:
    rows = []
    for record in trace.records:
        row = record.to_dict(include_timing)
        row["n"] = D0_size + record.n
        row.pop("theta", None)
        if truth is not None:
            row["abs_error"] = abs(record.mu - truth)
            row["z_score"] = (record.mu - truth) / record.sigma if record.sigma > 0 else math.copysign(math.inf, record.mu - truth)
        rows.append(row)
    return rows


def trace_summary(trace: BCTrace, truth: Optional[float]) -> dict:
    summary = {
        "method": trace.method.value,
        "mu": trace.final.mu,
        "sigma": trace.final.sigma,
        "n": trace.final.n,
        "stopped_by": trace.stopped_by.value if trace.stopped_by else None,
        "acquisitions": trace.n_acquisitions,
        "theta": trace.spec.to_dict() if trace.spec is not None else None,
    }
    if truth is not None:
        summary["truth"] = truth
        summary["abs_error"] = abs(trace.final.mu - truth)
        summary["z_score"] = trace.final.z_score(truth)
    return summary


def _stop(cfg: ExperimentConfig) -> StopRule:
    return StopRule(tau=cfg.stop.tau, budget=cfg.stop.budget)


def _synthetic(cfg: ExperimentConfig) -> SyntheticParams:
    params = cfg.integrand.params(cfg.seed)
    if params is None:
        raise ConfigError("this study needs a synthetic integrand, not an external command")
    return params


def run_adaptrap(cfg: ExperimentConfig, name: str = "adaptrap") -> RunRecord:
    """adap_trap on a one-dimensional synthetic integrand at each configured tau."""
    params = _synthetic(cfg)
    if params.d != 1:
        raise ConfigError(f"adap_trap integrates over [0, 1]; the integrand has d = {params.d}")
    f = as_evaluator(params)
    truth = reference_integral(params)
    trap = cfg.trap.to_config()
    rows = []
    started = time.perf_counter()
    for tau in cfg.trap.taus:
        result = adap_trap(f, 0.0, 1.0, tau, trap)
        rows.append(
            {
                "tau": tau,
                "estimate": result.estimate,
                "abs_error": abs(truth - result.estimate),
                "estimated_error": result.estimated_error,
                "n_evals": result.n_evals,
                "n_points": len(result.evaluations),
                "terminated": result.terminated,
            }
        )
        logger.info(f"adap_trap tau={tau}: error {abs(truth - result.estimate):.3g} with {result.n_evals} evaluations")
    return RunRecord(
        name=name,
        config_hash=config_hash(cfg.model_dump(mode="json")),
        rows=rows,
        summary={"truth": truth, "taus": list(cfg.trap.taus), "integrand": params.to_dict()},
        timing={"seconds": time.perf_counter() - started},
    )


def run_bc_experiment(cfg: ExperimentConfig, method: Optional[str] = None) -> RunRecord:
    """One cubature run on the configured integrand."""
    method = Method(method or cfg.method)
    stop = _stop(cfg)
    closer = None
    if cfg.integrand.command is not None:
        evaluator = external_integrand(cfg.integrand.command, timeout=cfg.eval_timeout, retries=cfg.eval_retries)
        closer = evaluator.close
        f = gaussian_reparam(evaluator) if cfg.integrand.gaussian else evaluator
        truth = None
        d = cfg.study.d
    else:
        params = _synthetic(cfg)
        f = as_evaluator(params)
        truth = reference_integral(params)
        d = params.d
    try:
        started = time.perf_counter()
        if d == 1:
            D0 = initial_design_1d(f, cfg.study.initial_points)
        else:
            D0 = initial_design_grid(f, [unit_grid(5)] * d)
        trace = run_bc(method, f, D0, stop, cfg.bc_settings(d))
        elapsed = time.perf_counter() - started
    finally:
        if closer is not None:
            closer()
    return RunRecord(
        name=f"bc_{method.value}",
        config_hash=config_hash(cfg.model_dump(mode="json")),
        rows=trace_rows(trace, D0.n, truth, cfg.include_timing),
        summary=trace_summary(trace, truth),
        timing={"seconds": elapsed},
    )


def posterior_curve(trace: BCTrace, params: SyntheticParams, n_grid: int) -> List[dict]:
    """Posterior mean and 95% band of f on an n_grid-point plotting grid, with the true f."""
    grid = np.array(unit_grid(n_grid - 1)).reshape(-1, 1)
    gp = condition(trace.spec, trace.data)
    lower, upper = credible_band(gp, grid, 0.95)
    mean = gp.mean(grid)
    truth = as_evaluator(params)(grid[:, 0])
    return [
        {"x": float(x), "mean": float(m), "lower": float(lo), "upper": float(hi), "f": float(t)}
        for x, m, lo, hi, t in zip(grid[:, 0], mean, lower, upper, truth)
    ]


def run_illustration(cfg: ExperimentConfig) -> List[RunRecord]:
    """AdapTrap, StdBC and EAdapBC side by side on the illustration integrand."""
    params = _synthetic(cfg)
    truth = reference_integral(params)
    f = as_evaluator(params)
    records = [run_adaptrap(cfg, name="illustration_adaptrap")]
    D0 = initial_design_1d(f, cfg.study.initial_points)
    for method in (Method.STD_BC, Method.E_ADAP_BC):
        started = time.perf_counter()
        trace = run_bc(method, f, D0, _stop(cfg), cfg.bc_settings(1))
        elapsed = time.perf_counter() - started
        summary = trace_summary(trace, truth)
        summary["points"] = [float(x) for x in np.sort(trace.data.X[:, 0])]
        summary["bump_density_ratio"] = bump_density_ratio(summary["points"], params)
        records.append(
            RunRecord(
                name=f"illustration_{method.value}",
                config_hash=config_hash(cfg.model_dump(mode="json")),
                rows=trace_rows(trace, D0.n, truth, cfg.include_timing),
                summary=summary,
                timing={"seconds": elapsed},
            )
        )
        records.append(
            RunRecord(
                name=f"illustration_{method.value}_curve",
                config_hash=config_hash(cfg.model_dump(mode="json")),
                rows=posterior_curve(trace, params, cfg.study.plot_grid),
                summary={"method": method.value, "level": 0.95},
            )
        )
    return records


def _bench_methods(cfg: ExperimentConfig) -> List[Tuple[str, Method, dict]]:
    """(label, method, settings overrides) for every method and variant of the sweep."""
    runs = []
    for name in cfg.study.methods:
        if name == "AdapTrap":
            raise ConfigError("synth-bench compares the cubature methods; AdapTrap has no posterior")
        method = Method(name)
        runs.append((method.value, method, {}))
        for variant in cfg.study.variants:
            overrides = {}
            if variant.nu is not None:
                overrides["rbf"] = RadialBasis(nu=variant.nu)
            if variant.field_kind is not None:
                overrides["field_kind"] = variant.field_kind
            runs.append((variant.label(method.value), method, overrides))
    return runs


def run_synthetic_assessment(cfg: ExperimentConfig) -> RunRecord:
    """
    Mean relative error and 95% coverage against the number of evaluations over an
    ensemble of random integrands.
    """
    d = cfg.study.d
    if cfg.stop.budget is None:
        raise ConfigError("synth-bench runs every method to a budget; set stop.budget")
    stop = StopRule(budget=cfg.stop.budget)
    runs = _bench_methods(cfg)
    rel_errors: Dict[Tuple[str, int], List[float]] = defaultdict(list)
    coverage: Dict[Tuple[str, int], List[float]] = defaultdict(list)
    started = time.perf_counter()

    for i in range(cfg.study.n_integrands):
        params = sample_params(d, np.random.default_rng([cfg.seed, i]), seed=cfg.seed)
        truth = reference_integral(params)
        f = as_evaluator(params)
        D0 = initial_design_1d(f, cfg.study.initial_points) if d == 1 else initial_design_grid(f, [unit_grid(5)] * d)
        for label, method, overrides in runs:
            settings = cfg.bc_settings(d, seed=cfg.seed + i, **overrides)
            trace = run_bc(method, f, D0, stop, settings)
            for record in trace.records:
                key = (label, D0.n + record.n)
                rel_errors[key].append(relative_error(record.mu, truth))
                coverage[key].append(float(covers(record.mu, record.sigma, truth)))
        logger.info(f"synth-bench: integrand {i + 1}/{cfg.study.n_integrands} done")

    rows = []
    order = {label: j for j, (label, _, _) in enumerate(runs)}
    for label, n in sorted(rel_errors, key=lambda key: (order[key[0]], key[1])):
        err, err_se = mean_and_se(rel_errors[(label, n)])
        cov, cov_se = mean_and_se(coverage[(label, n)])
        rows.append({"method": label, "n": n, "mean_rel_err": err, "se": err_se, "coverage": cov, "coverage_se": cov_se, "count": len(rel_errors[(label, n)])})
    return RunRecord(
        name="synth_bench",
        config_hash=config_hash(cfg.model_dump(mode="json")),
        rows=rows,
        summary={"d": d, "n_integrands": cfg.study.n_integrands, "budget": cfg.stop.budget, "methods": [r[0] for r in runs]},
        timing={"seconds": time.perf_counter() - started},
    )


def run_avgcase_validation(cfg: ExperimentConfig) -> RunRecord:
    """Monte Carlo checks of the average-case laws for k = 2 and rho = 2^(-3/2)."""
    m = cfg.trap.m
    n_reps = cfg.study.n_reps
    max_depth = cfg.study.avg_max_depth
    prior = WienerPrior()
    rho = 2.0**-1.5
    rng = np.random.default_rng(cfg.seed)
    rows = []
    started = time.perf_counter()

    studies = {}
    for tau in AVGCASE_TAUS:
        params = AverageCaseParams(rho=rho, m=m, k=2, tau=tau, prior=prior)
        studies[tau] = (params, mc_adaptrap_study(params, n_reps, max_depth, rng))

    for tau, (params, study) in studies.items():
        bound = prop1_lower_bound(tau, m, prior)
        p, se = study.exceed_probability()
        rows.append({"check": "exceed_probability", "tau": tau, "estimate": p, "se": se, "theory": bound, "pass": p > bound - 3 * se, "strict": p > bound})

    params, study = studies[0.05]
    alpha0 = alpha_i(0, params)
    p, se = study.frequency(SINGLE_NODE)
    rows.append({"check": "single_node_frequency", "tau": 0.05, "estimate": p, "se": se, "theory": alpha0, "pass": abs(p - alpha0) <= 3 * se, "strict": abs(p - alpha0) <= 3 * se})

    var, var_se, count = study.conditional_error_variance(SINGLE_NODE)
    theory = single_node_error_variance(m, prior)
    ok = count >= 2 and abs(var - theory) <= 4 * var_se
    rows.append({"check": "single_node_error_variance", "tau": 0.05, "estimate": var, "se": var_se, "theory": theory, "pass": ok, "strict": ok})

    params, study = studies[0.02]
    alpha = alpha_i(0, params)
    expected = 1.0 - prob_height_at_most(max_depth, params)
    rate = study.cutoff_rate
    se = math.sqrt(max(rate * (1 - rate), expected * (1 - expected)) / n_reps)
    ok = abs(rate - expected) <= 3 * se
    rows.append({"check": "cutoff_rate", "tau": 0.02, "estimate": rate, "se": se, "theory": expected, "pass": ok, "strict": ok, "nontermination": nontermination_prob_k2(alpha)})

    for row in rows:
        logger.info(f"{row['check']} tau={row['tau']}: {row['estimate']:.6g} vs {row['theory']:.6g} -> {'pass' if row['pass'] else 'FAIL'}")
    return RunRecord(
        name="avgcase",
        config_hash=config_hash(cfg.model_dump(mode="json")),
        rows=rows,
        summary={"m": m, "k": 2, "rho": rho, "n_reps": n_reps, "max_depth": max_depth, "studies": {str(t): s.to_dict() for t, (_, s) in studies.items()}},
        timing={"seconds": time.perf_counter() - started},
    )


def surrogate_command(name: str) -> List[str]:
    return [sys.executable, "-m", "adacube.harness.surrogate_server", name]


def run_robot_analogue(cfg: ExperimentConfig) -> RunRecord:
    """
    StdBC against EAdapBC on the arm surrogates, each served over the line protocol and
    integrated against N(0, I) through the Gaussian reparametrization.
    """
    if cfg.stop.budget is None:
        raise ConfigError("the robot study runs to a budget; set stop.budget")
    stop = StopRule(budget=cfg.stop.budget)
    rng = np.random.default_rng(cfg.seed)
    holdout = np.clip(norm.cdf(rng.standard_normal((cfg.study.holdout, 3))), 1e-12, 1 - 1e-12)
    interior = unit_grid(5, interior=True)
    U = [unit_grid(40, interior=True)] * 3
    rows = []
    started = time.perf_counter()
    for name in cfg.study.functions:
        if name not in SURROGATES:
            raise ConfigError(f"unknown surrogate {name!r}; choose from {sorted(SURROGATES)}")
        with external_integrand(surrogate_command(name), timeout=cfg.eval_timeout, retries=cfg.eval_retries) as process:
            f = gaussian_reparam(process)
            D0 = initial_design_grid(f, [interior] * 3)
            holdout_y = np.array([f(u) for u in holdout])
            for method in (Method.STD_BC, Method.E_ADAP_BC):
                trace = run_bc(method, f, D0, stop, cfg.bc_settings(3, robot=True, grid=U))
                bound, se = mse_bound(condition(trace.spec, trace.data), holdout, holdout_y)
                rows.append({"function": name, "method": method.value, "n": trace.data.n, "mse_bound": bound, "se": se, "mu": trace.final.mu, "sigma": trace.final.sigma})
                logger.info(f"robot {name} {method.value}: bound {bound:.4g} +- {se:.2g}")
    return RunRecord(
        name="robot",
        config_hash=config_hash(cfg.model_dump(mode="json")),
        rows=rows,
        summary={"functions": list(cfg.study.functions), "holdout": cfg.study.holdout, "budget": cfg.stop.budget},
        timing={"seconds": time.perf_counter() - started},
    )


def save_all(records: Sequence[RunRecord], out_dir: Path, include_timing: bool = False) -> List[Path]:
    paths = []
    columns = {"bc_": TRACE_COLUMNS, "illustration_StdBC": TRACE_COLUMNS, "illustration_EAdapBC": TRACE_COLUMNS, "synth_bench": BENCH_COLUMNS}
    for record in records:
        cols = None
        for prefix, value in columns.items():
            if record.name.startswith(prefix) and not record.name.endswith("_curve"):
                cols = value + (["aux_seconds"] if include_timing and value is TRACE_COLUMNS else [])
        paths.extend(record.save(out_dir, cols, include_timing))
    return paths
