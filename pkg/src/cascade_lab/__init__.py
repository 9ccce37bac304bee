"""Sequential information cascades on graphs.

Simulation of majority-vote cascades on arbitrary observation graphs, the
provably optimal complete-graph strategy (reveal thresholds via backward
induction), G(n, q) sweeps, and optimal layer-topology search.
"""

from .backend import active_backend, set_backend, set_workers
from .core import (
    ALWAYS_REVEAL,
    MAJORITY,
    MAJORITY_PROFILE,
    REVEAL_PROFILE,
    AlwaysReveal,
    CapacityError,
    CustomRule,
    DecisionTrace,
    InputError,
    MajorityRule,
    Rule,
    SignalModel,
    StrategyProfile,
    Topology,
    is_revealing,
    majority_decide,
    posterior_truth_given_diff,
    read_edge_list,
    run_sequence,
    signed_diff,
    valid_subsequence,
)
from .oracle import ExactLoss, exact_expected_wrong, exhaustive_optimal_complete, failure_prob_node
from .complete_opt import (
    DeltaTable,
    LossTable,
    ThresholdRule,
    compute_delta_fast,
    compute_delta_quadratic,
    lower_bound_curve,
    majority_step_value,
    optimal_expected_wrong,
    reveal_step_value,
    threshold_strategy,
    universal_delta,
)
from .layers import (
    CascadeProbs,
    LayerDesign,
    asymptotic_layers,
    build_layer_topology,
    cascade_probs,
    layer_expected_wrong,
    optimal_layers_exact,
    optimal_two_layer,
    read_layer_spec,
    signal_ratio_base,
)
from .random_graph import (
    ForcedPrefixSpec,
    SweepRow,
    default_q_grid,
    exponential_bound,
    forced_prefix_failure,
    forced_prefix_failure_exact,
    sample_gnq,
    sustainable_correct_fraction,
    sweep_q,
)
from .simulate import TopologySource, WrongCountEstimate, compare_topologies, estimate_expected_wrong

__version__ = "0.1.0"
