from .acquire_node import AcquireNode
from .evaluate_node import EvaluateNode
from .finalize_node import FinalizeNode
from .fit_node import FitNode

__all__ = ["AcquireNode", "EvaluateNode", "FinalizeNode", "FitNode"]
