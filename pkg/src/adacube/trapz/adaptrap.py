"""
Recursive adaptive trapezoidal method with full recursion-tree recording.

On each node the rule compares Q1 = Trap(m) against Q2 = Trap(2m). Q2 is accepted
when |Q2 - Q1| < tol, otherwise the interval is split into k equal parts, each
handled with tolerance rho * tol.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

from ..avgcase.trees import ROOT, FullKAryTree, Node, children_of
from ..exceptions import InvalidInputError
from .rules import checked_eval, composite_sum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrapConfig:
    rho: float = 0.5
    m: int = 5
    k: int = 2
    max_depth: int = 40
    memoise: bool = False

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidInputError(f"rho must be positive, got {self.rho}")
        if self.m < 1:
            raise InvalidInputError(f"m must be >= 1, got {self.m}")
        if self.k < 2:
            raise InvalidInputError(f"k must be >= 2, got {self.k}")
        if self.max_depth < 1:
            raise InvalidInputError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.memoise and self.m % self.k != 0:
            raise InvalidInputError(f"memoisation needs m to be a multiple of k, got m={self.m}, k={self.k}")

    @classmethod
    def from_options(cls, options: dict) -> "TrapConfig":
        return cls(**{key: options[key] for key in ("rho", "m", "k", "max_depth", "memoise") if key in options})


@dataclass
class AdapTrapResult:
    """
    Outcome of one adaptive trapezoidal run.

    evaluations holds the distinct (abscissa, value) pairs sorted by abscissa.
    n_evals counts integrand calls, which equals the number of distinct abscissae
    when memoisation is on.
    """

    estimate: float
    tree: FullKAryTree
    evaluations: List[Tuple[float, float]]
    local_errors: Dict[Node, float]
    terminated: bool
    n_evals: int
    truncated: List[Node] = field(default_factory=list)
    memo_hits: int = 0

    def leaves(self) -> List[Node]:
        return self.tree.leaves()

    @property
    def estimated_error(self) -> float:
        """Sum of |Q2 - Q1| over the leaves."""
        return math.fsum(abs(self.local_errors[node]) for node in self.tree.leaves() if node in self.local_errors)


class _GridEvaluator:
    """Evaluates f on the lattice a + (b-a) j / (2m k^q), keyed by the reduced fraction."""

    def __init__(self, f: Callable[[float], float], a: float, b: float, memoise: bool):
        self.f = f
        self.a = a
        self.b = b
        self.memoise = memoise
        self.calls = 0
        self.hits = 0
        self.values: Dict[Tuple[int, int], float] = {}

    def abscissa(self, key: Tuple[int, int]) -> float:
        num, den = key
        if num == den:
            return self.b
        return self.a + (self.b - self.a) * num / den

    def __call__(self, num: int, den: int) -> float:
        g = math.gcd(num, den)
        key = (num // g, den // g)
        if self.memoise and key in self.values:
            self.hits += 1
            return self.values[key]
        x = self.abscissa(key)
        value = checked_eval(self.f, x)
        self.calls += 1
        self.values[key] = value
        return value


class _CutoffReached(Exception):
    pass


def adap_trap(
    f: Callable[[float], float],
    a: float,
    b: float,
    tau: float,
    cfg: TrapConfig = TrapConfig(),
    stop_at_cutoff: bool = False,
) -> AdapTrapResult:
    """
    Adaptive trapezoidal integration of f over [a, b].

    Args:
        f: Scalar integrand
        a: Left endpoint
        b: Right endpoint, b > a
        tau: Root tolerance, tau > 0
        cfg: rho, m, k, max_depth and memoisation switch
        stop_at_cutoff: Abandon the run at the first node that would need to recurse
            past max_depth, instead of finishing the remaining branches

    Returns:
        AdapTrapResult; terminated is False when some branch hit max_depth, in which
        case the truncated nodes contribute their Q2 values
    """
    if not a < b:
        raise InvalidInputError(f"adap_trap needs a < b, got a={a}, b={b}")
    if not tau > 0:
        raise InvalidInputError(f"adap_trap needs tau > 0, got {tau}")

    m, k = cfg.m, cfg.k
    grid = _GridEvaluator(f, a, b, cfg.memoise)
    local_errors: Dict[Node, float] = {}
    inner = set()
    truncated: List[Node] = []
    accepted: List[float] = []

    def visit(node: Node):
        p, q = node
        tol = tau * cfg.rho**q
        den = 2 * m * k**q
        start = (p - 1) * 2 * m
        values = [grid(start + j, den) for j in range(2 * m + 1)]
        width = (b - a) / k**q
        q2 = composite_sum(values, width)
        q1 = composite_sum(values[::2], width)
        err = q2 - q1
        local_errors[node] = err
        if abs(err) < tol:
            accepted.append(q2)
            return
        if q >= cfg.max_depth:
            truncated.append(node)
            accepted.append(q2)
            if stop_at_cutoff:
                raise _CutoffReached()
            return
        inner.add(node)
        for child in children_of(node, k):
            visit(child)

    try:
        visit(ROOT)
    except _CutoffReached:
        logger.debug(f"adap_trap abandoned at depth {cfg.max_depth} after {grid.calls} evaluations")

    tree = FullKAryTree.from_inner(k, inner)
    evaluations = sorted((grid.abscissa(key), value) for key, value in grid.values.items())
    result = AdapTrapResult(
        estimate=math.fsum(accepted),
        tree=tree,
        evaluations=evaluations,
        local_errors=local_errors,
        terminated=not truncated,
        n_evals=grid.calls,
        truncated=truncated,
        memo_hits=grid.hits,
    )
    if truncated:
        logger.info(f"adap_trap hit max_depth={cfg.max_depth} on {len(truncated)} node(s)")
    logger.debug(f"adap_trap: estimate={result.estimate}, nodes={len(tree)}, n_evals={result.n_evals}")
    return result

