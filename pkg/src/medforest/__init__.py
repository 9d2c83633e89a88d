"""Depot placement and capacitated routing over finite metrics.

The package picks k depot locations by local search on a combined
service-plus-connectivity objective, then carves vehicle routes out of
a contracted spanning tree. Exhaustive oracles, instance generators,
and a verifying CLI round out the toolkit.
"""

from medforest._kernels import BACKEND
from medforest.errors import (
    GuardExceededError,
    MedforestError,
    ParseError,
    UnsplitInfeasibleError,
)
from medforest.instance import (
    DepotSet,
    Instance,
    ValidationReport,
    consistency_check,
    dist_to_set,
    flow_cost,
    med_cost,
    nearest_in_set,
    validate_instance,
)
from medforest.io import euclidean_matrix, read_instance, write_instance
from medforest.mst import contracted_mst, ktree_opt, mst, objective_report, tree_cost
from medforest.oracles import brute_cvrp, brute_subset_opt, divergence_report
from medforest.pipeline import (
    SolveResult,
    solve_bicriteria,
    solve_klocvrp,
    solve_ktree,
    solve_objective,
)
from medforest.routing import (
    RoutePlan,
    Trip,
    build_routes,
    lower_bound,
    plan_from_dict,
    plan_to_dict,
    validate_plan,
)
from medforest.search import Objective, SearchTrace, is_local_opt, local_search, phi

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DepotSet",
    "GuardExceededError",
    "Instance",
    "MedforestError",
    "Objective",
    "ParseError",
    "RoutePlan",
    "SearchTrace",
    "SolveResult",
    "Trip",
    "UnsplitInfeasibleError",
    "ValidationReport",
    "brute_cvrp",
    "brute_subset_opt",
    "build_routes",
    "consistency_check",
    "contracted_mst",
    "dist_to_set",
    "divergence_report",
    "euclidean_matrix",
    "flow_cost",
    "is_local_opt",
    "ktree_opt",
    "local_search",
    "lower_bound",
    "med_cost",
    "mst",
    "nearest_in_set",
    "objective_report",
    "phi",
    "plan_from_dict",
    "plan_to_dict",
    "read_instance",
    "solve_bicriteria",
    "solve_klocvrp",
    "solve_ktree",
    "solve_objective",
    "tree_cost",
    "validate_instance",
    "validate_plan",
    "write_instance",
    "__version__",
]
