import operator
from dataclasses import dataclass, field
from enum import Enum
from typing import Annotated, List, Optional, Tuple, TypedDict

import numpy as np

from ..embeddings.posterior import PosteriorIntegral
from ..exceptions import EvaluationError, InvalidInputError
from ..gp.dataset import Dataset
from ..kernels.product import ProductKernelSpec

# evaluation cap when only a tolerance is given
DEFAULT_MAX_EVALUATIONS = 1000


class Method(str, Enum):
    STD_BC = "StdBC"
    E_ADAP_BC = "EAdapBC"
    ADAP_BC = "AdapBC"


class StopReason(str, Enum):
    TOLERANCE = "Tolerance"
    BUDGET = "Budget"


@dataclass(frozen=True)
class StopRule:
    """Stop once sigma_n < tau, or once the design holds budget points (D0 included)."""

    tau: Optional[float] = None
    budget: Optional[int] = None

    def __post_init__(self):
        if self.tau is None and self.budget is None:
            raise InvalidInputError("a stop rule needs a tolerance, a budget or both")
        if self.tau is not None and not self.tau > 0:
            raise InvalidInputError(f"tau must be positive, got {self.tau}")
        if self.budget is not None and self.budget < 1:
            raise InvalidInputError(f"budget must be >= 1, got {self.budget}")

    @property
    def cap(self) -> int:
        return self.budget if self.budget is not None else DEFAULT_MAX_EVALUATIONS

    def reason(self, posterior: PosteriorIntegral, n_data: int) -> Optional[StopReason]:
        if self.tau is not None and posterior.sigma < self.tau:
            return StopReason.TOLERANCE
        if n_data >= self.cap:
            return StopReason.BUDGET
        return None


@dataclass(frozen=True)
class BCRecord:
    n: int
    x: Tuple[float, ...]
    y: float
    theta: dict
    mu: float
    sigma: float
    aux_seconds: float

    def to_dict(self, include_timing: bool = False) -> dict:
        row = {"n": self.n, "x": list(self.x), "y": self.y, "theta": self.theta, "mu": self.mu, "sigma": self.sigma}
        if include_timing:
            row["aux_seconds"] = self.aux_seconds
        return row


@dataclass
class BCTrace:
    method: Method
    records: List[BCRecord]
    final: PosteriorIntegral
    stopped_by: Optional[StopReason]
    data: Dataset
    spec: Optional[ProductKernelSpec] = None
    theta_samples: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n_acquisitions(self) -> int:
        return len(self.records)

    def acquired_points(self) -> np.ndarray:
        if not self.records:
            return np.empty((0, self.data.d))
        return np.array([r.x for r in self.records])

    def to_dict(self, include_timing: bool = False) -> dict:
        """Serializable summary; wall-clock timings are left out unless asked for."""
        return {
            "method": self.method.value,
            "stopped_by": self.stopped_by.value if self.stopped_by else None,
            "final": {"mu": self.final.mu, "sigma": self.final.sigma, "n": self.final.n},
            "records": [r.to_dict(include_timing) for r in self.records],
        }


class BCState(TypedDict, total=False):
    """State carried through the acquisition graph."""

    data: Dataset
    spec: ProductKernelSpec
    theta_samples: np.ndarray
    chain_start: np.ndarray
    current: PosteriorIntegral
    candidates: np.ndarray
    scores: np.ndarray
    x_next: np.ndarray
    aux_seconds: float
    records: Annotated[List[BCRecord], operator.add]
    stopped_by: Optional[StopReason]
    final: PosteriorIntegral
    error: Optional[EvaluationError]
