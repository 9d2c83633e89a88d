"""End-to-end solvers: pick depots, build routes, certify the result.

The main entry point reduces the routing problem to the combined
objective with rho = Q/2, runs restarted multi-swap descent, routes the
winning depots, and reports the cost against the max(flow, tree) lower
bound. The bicriteria variant unions a pure-service optimum with the
exact pure-connectivity optimum, trading up to 2k open depots for a
bound on both terms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from medforest.errors import MedforestError, UnsplitInfeasibleError
from medforest.instance import DepotSet, Instance, ObjectiveReport
from medforest.mst import ktree_opt, objective_report
from medforest.oracles import SUBSET_GUARD, exhaustive_routing_lb
from medforest.routing import RoutePlan, build_routes, lower_bound, plan_to_dict
from medforest.search import Objective, SearchTrace, local_search

# exhaustive certification kicks in at or below this size
EXHAUSTIVE_N = 12

DEFAULT_RESTARTS = 8


@dataclass
class SolveResult:
    """Everything one solver run produced, JSON-ready via to_dict."""

    mode: str
    depots: tuple[int, ...]
    report: ObjectiveReport
    params: dict
    phi: float | None = None
    plan: RoutePlan | None = None
    lb: float | None = None
    global_lb: float | None = None
    lb_certified_global: bool = False
    ratio: float | None = None
    budget_violation: float | None = None
    best_trace: SearchTrace | None = None

    def to_dict(self, inst: Instance, trace_file: str | None = None) -> dict:
        out = {
            "mode": self.mode,
            "depots": list(self.depots),
            "report": {
                "med": self.report.med,
                "flow": self.report.flow,
                "tree_d": self.report.tree_d,
                "tree_c": self.report.tree_c,
            },
            "phi": self.phi,
            "plan": plan_to_dict(inst, self.plan) if self.plan is not None else None,
            "lower_bound": self.lb,
            "global_lower_bound": self.global_lb,
            "lb_certified_global": self.lb_certified_global,
            "ratio": self.ratio,
            "budget_violation": self.budget_violation,
            "params": self.params,
            "trace_file": trace_file,
        }
        return out


def _restarted_search(
    inst: Instance,
    obj: Objective,
    t: int,
    delta: float,
    restarts: int,
    seed: int,
    threads: int,
) -> tuple[tuple[int, ...], SearchTrace, list[int], float]:
    """Best-of-restarts local search; ties go to the lowest seed index."""
    if restarts < 1:
        raise MedforestError(f"restarts={restarts} must be at least 1")
    seeds = [int(seed) + r for r in range(restarts)]

    def run(s: int):
        return local_search(inst, obj, t=t, delta=delta, seed=s)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, seeds))
    else:
        outcomes = [run(s) for s in seeds]
    best_idx = 0
    for i in range(1, restarts):
        if outcomes[i][1].phi_final < outcomes[best_idx][1].phi_final:
            best_idx = i
    depots, trace = outcomes[best_idx]
    return depots.members, trace, seeds, trace.phi_final


def _global_bound(inst: Instance) -> tuple[float | None, tuple[int, ...] | None]:
    if inst.n > EXHAUSTIVE_N or math.comb(inst.n, inst.k) > SUBSET_GUARD:
        return None, None
    value, mem = exhaustive_routing_lb(inst)
    return value, mem


def _require_routable(inst: Instance) -> None:
    if inst.Q is None or inst.Q <= 0:
        raise MedforestError("solving for routes needs a positive capacity Q")
    over = [u for u in range(inst.n) if inst.q[u] > inst.Q]
    if over:
        raise UnsplitInfeasibleError(
            f"demand q[{over[0]}]={inst.q[over[0]]!r} exceeds capacity Q={inst.Q!r}"
        )


def solve_klocvrp(
    inst: Instance,
    t: int = 2,
    delta: float = 1e-7,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    threads: int = 1,
    depot_policy: str = "nearest",
) -> SolveResult:
    """Depot selection through the rho = Q/2 objective, then routing.

    The reported lower bound is max(flow, tree) at the returned depots;
    when the instance is small enough the exhaustive minimum over all
    depot sets is also computed and reported as global_lower_bound.
    """
    _require_routable(inst)
    obj = Objective(rho=inst.Q / 2.0, tree_metric="d")
    depots, trace, seeds, phi_best = _restarted_search(
        inst, obj, t, delta, restarts, seed, threads
    )
    plan = build_routes(inst, depots, depot_policy=depot_policy)
    report = objective_report(inst, depots)
    lb = lower_bound(inst, depots)
    global_lb, _ = _global_bound(inst)
    ratio = None
    if lb > 0:
        ratio = plan.total_cost / lb
    elif plan.total_cost <= 1e-12:
        ratio = 1.0
    return SolveResult(
        mode="locvrp",
        depots=depots,
        report=report,
        phi=phi_best,
        plan=plan,
        lb=lb,
        global_lb=global_lb,
        lb_certified_global=global_lb is not None,
        ratio=ratio,
        params={
            "mode": "locvrp",
            "t": t,
            "delta": delta,
            "restarts": restarts,
            "seed": int(seed),
            "seeds": seeds,
            "threads": threads,
            "depot_policy": depot_policy,
            "rho": inst.Q / 2.0,
            "tree_metric": "d",
            "k": inst.k,
        },
        best_trace=trace,
    )


def solve_bicriteria(
    inst: Instance,
    t: int = 2,
    delta: float = 1e-7,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    threads: int = 1,
    depot_policy: str = "nearest",
) -> SolveResult:
    """Union of a service optimum and the exact connectivity optimum.

    Opens at most 2k depots: the rho = 0 search handles the flow term,
    ktree_opt the tree term. budget_violation reports |depots| / k.
    """
    _require_routable(inst)
    obj = Objective(rho=0.0, tree_metric="d")
    med_depots, trace, seeds, _ = _restarted_search(
        inst, obj, t, delta, restarts, seed, threads
    )
    mst_depots, _ = ktree_opt(inst, inst.k, "d")
    union = DepotSet.of(set(med_depots) | set(mst_depots.members))
    plan = build_routes(inst, union, depot_policy=depot_policy)
    report = objective_report(inst, union)
    lb = lower_bound(inst, union)
    global_lb, _ = _global_bound(inst)
    ratio = None
    if lb > 0:
        ratio = plan.total_cost / lb
    elif plan.total_cost <= 1e-12:
        ratio = 1.0
    return SolveResult(
        mode="bicriteria",
        depots=union.members,
        report=report,
        phi=None,
        plan=plan,
        lb=lb,
        global_lb=global_lb,
        lb_certified_global=global_lb is not None,
        ratio=ratio,
        budget_violation=len(union.members) / inst.k,
        params={
            "mode": "bicriteria",
            "t": t,
            "delta": delta,
            "restarts": restarts,
            "seed": int(seed),
            "seeds": seeds,
            "threads": threads,
            "depot_policy": depot_policy,
            "k": inst.k,
            "service_depots": list(med_depots),
            "tree_depots": list(mst_depots.members),
        },
        best_trace=trace,
    )


def solve_objective(
    inst: Instance,
    obj: Objective,
    mode: str,
    t: int = 2,
    delta: float = 1e-7,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
    threads: int = 1,
) -> SolveResult:
    """Depot selection only (no routing) under an explicit objective."""
    depots, trace, seeds, phi_best = _restarted_search(
        inst, obj, t, delta, restarts, seed, threads
    )
    report = objective_report(inst, depots)
    return SolveResult(
        mode=mode,
        depots=depots,
        report=report,
        phi=phi_best,
        params={
            "mode": mode,
            "t": t,
            "delta": delta,
            "restarts": restarts,
            "seed": int(seed),
            "seeds": seeds,
            "threads": threads,
            "rho": obj.rho,
            "tree_metric": obj.tree_metric,
            "k": inst.k,
        },
        best_trace=trace,
    )


def solve_ktree(inst: Instance, tree_metric: str = "d") -> SolveResult:
    """Exact pure-connectivity optimum (no search, no routing)."""
    depots, value = ktree_opt(inst, inst.k, tree_metric)
    report = objective_report(inst, depots.members)
    return SolveResult(
        mode="ktree",
        depots=depots.members,
        report=report,
        phi=value,
        params={"mode": "ktree", "tree_metric": tree_metric, "k": inst.k},
    )
