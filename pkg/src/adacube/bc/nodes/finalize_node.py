import logging

from ..models import SurrogateModel
from ..state import BCState, StopRule

logger = logging.getLogger(__name__)


class FinalizeNode:
    def __init__(self, model: SurrogateModel, stop: StopRule):
        self.model = model
        self.stop = stop

    def process(self, state: BCState) -> dict:
        if state.get("error") is not None:
            return {"stopped_by": None, "final": state["current"]}
        reason = self.stop.reason(state["current"], state["data"].n)
        update = self.model.finalize(state)
        update["stopped_by"] = reason
        final = update["final"]
        logger.info(f"stopped by {reason.value if reason else None} after {len(state.get('records', []))} acquisitions: mu {final.mu:.10g}, sigma {final.sigma:.3g}")
        return update
