import logging
import time
from typing import Callable

import numpy as np

from ...gp.dataset import Dataset
from ..models import SurrogateModel
from ..state import BCState

logger = logging.getLogger(__name__)


class AcquireNode:
    def __init__(self, model: SurrogateModel, candidates: Callable[[Dataset, int], np.ndarray]):
        """
        Args:
            model: Surrogate that scores candidates by expected posterior variance
            candidates: Candidate source called with the design and the acquisition index
        """
        self.model = model
        self.candidates = candidates

    def process(self, state: BCState) -> dict:
        """Pick the candidate of least expected variance; ties go to the lowest index."""
        started = time.perf_counter()
        n = len(state.get("records", [])) + 1
        candidates = self.candidates(state["data"], n)
        scores = np.asarray(self.model.scores(state, candidates), dtype=float)
        best = int(np.argmin(scores))
        logger.debug(f"acquisition {n}: {candidates.shape[0]} candidates, best score {scores[best]:.6g}")
        return {
            "candidates": candidates,
            "scores": scores,
            "x_next": candidates[best],
            "aux_seconds": state.get("aux_seconds", 0.0) + time.perf_counter() - started,
        }
