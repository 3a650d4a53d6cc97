"""Distributed voting mechanisms under metric costs.

Exact evaluation of two-stage voting mechanisms, the cost objectives they
are judged by, adversarial instance families that pin their worst cases,
and an audit harness that verifies every built-in distortion bound.
"""

from .audit import (
    BUILTIN_BOUNDS,
    AuditReport,
    BoundSpec,
    SuiteParams,
    brute_force_centralized_distortion,
    detdet_positional_witness,
    evaluate_lower_bound,
    search_worst_case,
    verify_suite,
    verify_upper_bound,
)
from .errors import DistortionLabError
from .generators import (
    GeneratedInstance,
    euclidean_randdet_ratio,
    euclidean_randrand_ratio,
    gen_cyclic_avgmax,
    gen_detdet_maxavg,
    gen_euclidean_randdet,
    gen_euclidean_randrand,
    gen_random,
    gen_randdet_avgavg,
    gen_randdet_maxavg,
    gen_randdet_xmax,
    gen_randrand_avgavg,
    gen_randrand_maxx,
)
from .mechanisms import (
    DistortionReport,
    MechanismSpec,
    Scope,
    distortion,
    expected_cost,
    run_first_stage,
    run_mechanism,
)
from .metrics import (
    EuclideanMetric,
    Graph,
    GraphMetric,
    LineMetric,
    MatrixMetric,
    shortest_path_closure,
    validate_metric,
)
from .model import GroupPartition, Instance, check_consistency, derive_profile, promote
from .objectives import (
    ALL_OBJECTIVES,
    Objective,
    cost,
    farthest_voter,
    group_cost,
    optimal_candidate,
    worst_group,
)
from .rules import (
    RULES,
    domination_graph,
    is_pareto_efficient,
    pareto_improve,
    plurality_matching,
    plurality_matching_pareto,
    random_dictatorship,
    uniform_over_groups,
)
from .serialize import dump_instance, instance_digest, load_instance
from .tournament import BiasTournament, build_bias_tournament

__version__ = "0.1.0"
