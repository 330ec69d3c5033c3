from .laws import (
    AverageCaseParams,
    InnerNodeExpectation,
    WienerPrior,
    alpha_i,
    expected_inner_nodes,
    nontermination_prob_k2,
    prob_height_at_most,
    prop1_lower_bound,
    single_node_error_variance,
    termination_prob,
    termination_threshold,
    trap_error_variance,
    tree_probability,
)
from .study import StudyResult, error_independence_check, mc_adaptrap_study
from .trees import (
    FullKAryTree,
    catalan_generating_function,
    catalan_k,
    enumerate_full_trees,
    enumerate_trees_with_inner,
    preorder,
    tree_extension_size,
)
from .wiener import LazyWienerPath, wiener_sample
