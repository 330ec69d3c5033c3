import time

from ..models import SurrogateModel
from ..state import BCState


class FitNode:
    """Refreshes the hyperparameters on the current design and reports the integral's posterior."""

    def __init__(self, model: SurrogateModel):
        self.model = model

    def process(self, state: BCState) -> dict:
        started = time.perf_counter()
        update = self.model.refresh(state)
        update["aux_seconds"] = time.perf_counter() - started
        return update
