import logging
import math
from typing import Callable

import numpy as np

from ...exceptions import EvaluationError
from ..models import SurrogateModel
from ..state import BCRecord, BCState

logger = logging.getLogger(__name__)


class EvaluateNode:
    """Evaluates the integrand at the chosen point and appends the observation and its record."""

    def __init__(self, model: SurrogateModel, evaluator: Callable[[np.ndarray], float]):
        self.model = model
        self.evaluator = evaluator

    def _evaluate(self, x: np.ndarray) -> float:
        point = x[0] if x.size == 1 else x
        try:
            value = float(self.evaluator(point))
        except EvaluationError:
            raise
        except Exception as e:
            raise EvaluationError(f"Error: Failed to evaluate the integrand at {x.tolist()}: {e}", abscissa=x.tolist()) from e
        if not math.isfinite(value):
            raise EvaluationError(f"integrand returned {value} at {x.tolist()}", abscissa=x.tolist())
        return value

    def process(self, state: BCState) -> dict:
        x = np.asarray(state["x_next"], dtype=float)
        try:
            y = self._evaluate(x)
        except EvaluationError as e:
            logger.warning(f"evaluation failed, stopping: {e}")
            return {"error": e}
        data = state["data"].append(x, y)
        posterior = self.model.summarize(state, data)
        record = BCRecord(
            n=len(state.get("records", [])) + 1,
            x=tuple(float(v) for v in x),
            y=y,
            theta=state["spec"].to_dict(),
            mu=posterior.mu,
            sigma=posterior.sigma,
            aux_seconds=state.get("aux_seconds", 0.0),
        )
        logger.debug(f"acquisition {record.n} at {record.x}: mu {record.mu:.6g}, sigma {record.sigma:.3g}")
        return {"data": data, "current": posterior, "records": [record]}
