"""Random-walk Metropolis sampler over unconstrained hyperparameter vectors."""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MCMCConfig:
    steps: int = 1040
    burn_in: int = 1000
    thin: int = 5
    scale: float = 0.3
    seed: Optional[int] = None

    def __post_init__(self):
        if self.thin < 1:
            raise InvalidInputError(f"thin must be >= 1, got {self.thin}")
        if not 0 <= self.burn_in < self.steps:
            raise InvalidInputError(f"need 0 <= burn_in < steps, got burn_in={self.burn_in}, steps={self.steps}")
        if not self.scale > 0:
            raise InvalidInputError(f"proposal scale must be positive, got {self.scale}")


@dataclass
class MCMCResult:
    chain: np.ndarray
    log_targets: np.ndarray
    acceptance_rate: float
    last: np.ndarray

    def trace_rows(self) -> List[dict]:
        """One row per retained draw, for export."""
        return [
            {"draw": i, "log_target": float(lp), **{f"theta_{j}": float(v) for j, v in enumerate(theta)}}
            for i, (theta, lp) in enumerate(zip(self.chain, self.log_targets))
        ]


def scale_schedule(n: int, start: float = 0.3, slope: float = 0.007, floor: float = 0.01) -> float:
    """Proposal scale for acquisition n, max(floor, start - slope n)."""
    return max(floor, start - slope * n)


def metropolis(
    log_target: Callable[[np.ndarray], float],
    theta0,
    cfg: MCMCConfig,
    rng: Optional[np.random.Generator] = None,
) -> MCMCResult:
    """
    Gaussian random-walk Metropolis.

    Args:
        log_target: Unnormalized log density; non-finite values reject the proposal
        theta0: Starting point, where log_target must be finite
        cfg: Chain length, burn-in, thinning, proposal scale and seed
        rng: Generator to use instead of one seeded from cfg.seed

    Returns:
        MCMCResult with the draws after burn-in kept every thin steps
    """
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    current = np.array(theta0, dtype=float).reshape(-1)
    current_lp = float(log_target(current))
    if not math.isfinite(current_lp):
        raise InvalidInputError("log target is not finite at the starting point")

    kept, kept_lp = [], []
    accepted = 0
    for step in range(cfg.steps):
        proposal = current + cfg.scale * rng.standard_normal(current.size)
        log_u = -rng.exponential()
        proposal_lp = float(log_target(proposal))
        if math.isfinite(proposal_lp) and log_u < proposal_lp - current_lp:
            current, current_lp = proposal, proposal_lp
            accepted += 1
        if step >= cfg.burn_in and (step - cfg.burn_in) % cfg.thin == 0:
            kept.append(current.copy())
            kept_lp.append(current_lp)

    rate = accepted / cfg.steps
    logger.debug(f"metropolis: {cfg.steps} steps at scale {cfg.scale}, acceptance {rate:.3f}")
    return MCMCResult(
        chain=np.array(kept).reshape(len(kept), current.size),
        log_targets=np.array(kept_lp),
        acceptance_rate=rate,
        last=current.copy(),
    )
