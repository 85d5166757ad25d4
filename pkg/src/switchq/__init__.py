"""Steady-state evaluation and optimization of worker-switching policies
for a finite-capacity Markovian service system with a back-room task pool."""

from .core import (EPS_B, Instance, Metrics, Policy, evaluate_b_wq,
                   evaluate_closed_form, evaluate_direct, is_feasible,
                   max_backroom_policy, min_wait_policy, validate_instance,
                   validate_policy)
from .heuristic import HeuristicResult, HeuristicStep, run_p1
from .instances import GenSpec, generate, read_instances, write_instances
from .policies import (ENUMERATION_LIMIT, brute_force_optimum, iter_policies,
                       policy_count)
from .solver import (STRATEGIES, DomainStore, SearchStats, SolveResult,
                     SolverConfig, alternating_shave, bl_shave, search, solve,
                     wq_shave)

__version__ = "0.1.0"

__all__ = [
    "EPS_B", "ENUMERATION_LIMIT", "STRATEGIES",
    "Instance", "Metrics", "Policy",
    "GenSpec", "DomainStore", "SearchStats", "SolverConfig", "SolveResult",
    "HeuristicResult", "HeuristicStep",
    "evaluate_direct", "evaluate_closed_form", "evaluate_b_wq", "is_feasible",
    "validate_instance", "validate_policy",
    "min_wait_policy", "max_backroom_policy",
    "iter_policies", "policy_count", "brute_force_optimum",
    "run_p1",
    "bl_shave", "wq_shave", "alternating_shave", "search", "solve",
    "generate", "read_instances", "write_instances",
]
