"""Capacity-bounded route construction on top of a contracted MST.

The plan built here always costs at most 2*flow_cost + 2*tree_cost,
asserted at runtime. The construction (per depot component, rooted at
the depot):

* vertices with demand above Q/2 get individual round trips;
* remaining demand is carved bottom-up into connected groups of tree
  edges: child bundles merge into their parent in ascending child
  order, and a group closes as soon as its load exceeds Q/2, so every
  carved group has load in (Q/2, Q] and the groups are edge-disjoint;
* the leftover bundle at the root (load <= Q/2) is served directly
  from the depot, with no connector cost at all.

A carved group is entered and left through its customer nearest to the
depot set, served from the depot attaining that distance (policy
``nearest``, the default). Its trip costs at most twice that distance
plus twice the group's tree edges; the distance is chargeable against
flow_cost because the group's load exceeds Q/2. Policy ``component``
instead serves every group from its component's own depot, which keeps
all trips component-local but has no comparable worst-case guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from medforest.errors import MedforestError, UnsplitInfeasibleError
from medforest.instance import (
    Instance,
    Violation,
    as_members,
    dist_to_set,
    flow_cost,
    nearest_in_set,
)
from medforest.mst import ContractedTree, contracted_mst, tree_cost

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class Trip:
    """One vehicle round trip: depot -> stops in order -> depot."""

    depot: int
    stops: tuple[int, ...]
    load: float
    length: float


@dataclass(frozen=True)
class RoutePlan:
    depots: tuple[int, ...]
    trips: tuple[Trip, ...]
    total_cost: float


def lower_bound(inst: Instance, S) -> float:
    """max(flow_cost, contracted tree cost): a bound on any unsplit plan.

    The tree term is only a valid bound when every non-depot vertex
    carries positive demand (the spanning structure includes
    zero-demand vertices that routes need not visit); all generators in
    this package emit strictly positive demands.
    """
    mem = as_members(S, inst.n)
    return max(flow_cost(inst, mem), tree_cost(inst, mem, "d"))


def _walk_length(d: np.ndarray, depot: int, stops) -> float:
    acc = float(d[depot, stops[0]])
    for a, b in zip(stops, stops[1:]):
        acc += float(d[a, b])
    acc += float(d[stops[-1], depot])
    return acc


def _stops_load(q: np.ndarray, stops) -> float:
    acc = 0.0
    for u in stops:
        acc += float(q[u])
    return acc


def _rooted_children(inst: Instance, tree: ContractedTree, f: int):
    """Preorder and children lists for f's component.

    Neighbors are ordered by (distance, vertex id), so on tie-free
    instances the construction commutes with vertex relabeling.
    """
    d = inst.d
    adj: dict[int, list[int]] = {}
    for a, b in tree.edges:
        if tree.attachment[a] == f:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    order = []
    seen = set()
    stack = [f]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        order.append(v)
        nxt = [w for w in adj.get(v, ()) if w not in seen]
        nxt.sort(key=lambda w: (d[v, w], w), reverse=True)
        stack.extend(nxt)
    pos = {v: i for i, v in enumerate(order)}
    children = {
        v: sorted(
            (w for w in adj.get(v, ()) if pos[w] > pos[v]),
            key=lambda w, _v=v: (d[_v, w], w),
        )
        for v in order
    }
    return order, pos, children


def _carve(inst: Instance, f: int, order, children, half: float):
    """Bottom-up carving of f's component into load-(Q/2, Q] groups.

    Returns (groups, residual) where each entry is (customers, edges);
    the residual (load <= Q/2) stays anchored at the depot. Reverse
    preorder processes every child before its parent.
    """
    q = inst.q
    bud: dict[int, tuple[float, list[int], list[tuple[int, int]]]] = {}
    groups: list[tuple[list[int], list[tuple[int, int]]]] = []
    for v in reversed(order):
        small = v != f and 0.0 < q[v] <= half
        load = float(q[v]) if small else 0.0
        custs = [v] if small else []
        edges: list[tuple[int, int]] = []
        for child in children[v]:
            b_load, b_custs, b_edges = bud.pop(child)
            load += b_load
            custs.extend(b_custs)
            edges.extend(b_edges)
            edges.append((v, child))
            if load > half:
                groups.append((custs, edges))
                load, custs, edges = 0.0, [], []
        bud[v] = (load, custs, edges)
    _, root_custs, root_edges = bud[f]
    return groups, (root_custs, root_edges)


def _subtree_stops(d: np.ndarray, edges, custs, start: int):
    """Customers of one carved group in preorder from ``start``.

    Same (distance, id) neighbor order as the component preorder.
    """
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    cust_set = set(custs)
    stops = []
    seen = set()
    stack = [start]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in cust_set:
            stops.append(v)
        nxt = [w for w in adj.get(v, ()) if w not in seen]
        nxt.sort(key=lambda w: (d[v, w], w), reverse=True)
        stack.extend(nxt)
    return tuple(stops)


def _entry_customer(inst: Instance, mem, custs, policy: str, f: int):
    """Entry stop and serving depot for one carved group."""
    if policy == "component":
        depot = f
        best_u, best = custs[0], float("inf")
        for u in sorted(custs):
            v = float(inst.d[u, f])
            if v < best:
                best, best_u = v, u
        return best_u, depot
    best_u, best = custs[0], float("inf")
    for u in sorted(custs):
        v = dist_to_set(inst, u, mem)
        if v < best:
            best, best_u = v, u
    return best_u, nearest_in_set(inst, best_u, mem)[0]


def build_routes(inst: Instance, S, depot_policy: str = "nearest") -> RoutePlan:
    """Serve every positive demand unsplit, within capacity, provably cheap.

    Raises UnsplitInfeasibleError when some demand exceeds Q. The
    returned plan's cost is asserted to be at most
    2*flow_cost(inst, S) + 2*tree_cost(inst, S) (absolute slack 1e-9);
    a failure of that assertion is an internal error.
    """
    if inst.Q is None or inst.Q <= 0:
        raise MedforestError("build_routes needs a positive capacity Q")
    if depot_policy not in ("nearest", "component"):
        raise MedforestError(f"unknown depot policy {depot_policy!r}")
    if np.any(inst.q < 0):
        raise MedforestError("negative demands cannot be routed")
    mem = as_members(S, inst.n)
    Q = float(inst.Q)
    over = [u for u in range(inst.n) if u not in mem and inst.q[u] > Q]
    if over:
        raise UnsplitInfeasibleError(
            f"demand q[{over[0]}]={inst.q[over[0]]!r} exceeds capacity Q={Q!r}"
        )
    half = Q / 2.0
    tree = contracted_mst(inst, mem, "d")

    keyed: list[tuple[tuple[int, int, int], Trip]] = []
    for f in mem:
        order, pos, children = _rooted_children(inst, tree, f)
        big = [v for v in order if v != f and inst.q[v] > half]
        groups, residual = _carve(inst, f, order, children, half)
        for custs, edges in groups:
            entry, depot = _entry_customer(inst, mem, custs, depot_policy, f)
            stops = _subtree_stops(inst.d, edges, custs, entry)
            trip = Trip(
                depot=depot,
                stops=stops,
                load=_stops_load(inst.q, stops),
                length=_walk_length(inst.d, depot, stops),
            )
            keyed.append(((depot, f, pos[stops[0]]), trip))
        res_custs, res_edges = residual
        if res_custs:
            stops = _subtree_stops(inst.d, res_edges, res_custs, f)
            trip = Trip(
                depot=f,
                stops=stops,
                load=_stops_load(inst.q, stops),
                length=_walk_length(inst.d, f, stops),
            )
            keyed.append(((f, f, pos[stops[0]]), trip))
        for u in big:
            depot = f if depot_policy == "component" else nearest_in_set(inst, u, mem)[0]
            trip = Trip(
                depot=depot,
                stops=(u,),
                load=float(inst.q[u]),
                length=_walk_length(inst.d, depot, (u,)),
            )
            keyed.append(((depot, f, pos[u]), trip))

    keyed.sort(key=lambda pair: pair[0])
    trips = [trip for _, trip in keyed]
    total = 0.0
    for tr in trips:
        total += tr.length

    bound = 2.0 * flow_cost(inst, mem) + 2.0 * tree.cost
    if total > bound + BOUND_TOL:
        raise MedforestError(
            f"internal: plan cost {total!r} exceeds 2*flow+2*tree bound {bound!r}"
        )
    return RoutePlan(depots=mem, trips=tuple(trips), total_cost=total)


@dataclass
class PlanReport:
    """Outcome of validate_plan; report-only, like instance validation."""

    violations: list[Violation] = field(default_factory=list)
    total_cost: float = 0.0
    lower_bound: float | None = None
    ratio: float | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_plan(inst: Instance, plan: RoutePlan) -> PlanReport:
    """Check coverage, capacity, and arithmetic of a plan; never raises."""
    report = PlanReport(total_cost=plan.total_cost)
    bad = Violation
    try:
        mem = as_members(plan.depots, inst.n)
    except MedforestError as exc:
        report.violations.append(bad("depots", str(exc)))
        return report
    seen: dict[int, int] = {}
    length_sum = 0.0
    for idx, trip in enumerate(plan.trips):
        if trip.depot not in mem:
            report.violations.append(bad(
                "trip_depot", f"trip {idx} starts at {trip.depot}, not an open depot", (idx,)
            ))
            continue
        if not trip.stops:
            report.violations.append(bad("trip_empty", f"trip {idx} has no stops", (idx,)))
            continue
        if any(not 0 <= u < inst.n for u in trip.stops):
            report.violations.append(bad(
                "trip_stop_range", f"trip {idx} visits an out-of-range vertex", (idx,)
            ))
            continue
        for u in trip.stops:
            if u in mem:
                report.violations.append(bad(
                    "trip_visits_depot", f"trip {idx} visits open depot {u}", (idx, u)
                ))
            seen[u] = seen.get(u, 0) + 1
        load = _stops_load(inst.q, trip.stops)
        if abs(load - trip.load) > BOUND_TOL:
            report.violations.append(bad(
                "trip_load", f"trip {idx} records load {trip.load!r}, stops sum to {load!r}",
                (idx,),
            ))
        if inst.Q is not None and load > inst.Q + BOUND_TOL:
            report.violations.append(bad(
                "trip_overload", f"trip {idx} load {load!r} exceeds Q={inst.Q!r}", (idx,)
            ))
        length = _walk_length(inst.d, trip.depot, trip.stops)
        if abs(length - trip.length) > BOUND_TOL:
            report.violations.append(bad(
                "trip_length",
                f"trip {idx} records length {trip.length!r}, walk costs {length!r}",
                (idx,),
            ))
        length_sum += trip.length
    for u in range(inst.n):
        if u in mem:
            continue
        count = seen.get(u, 0)
        if inst.q[u] > 0 and count != 1:
            report.violations.append(bad(
                "coverage", f"vertex {u} (demand {inst.q[u]!r}) served {count} times", (u,)
            ))
    if abs(length_sum - plan.total_cost) > BOUND_TOL:
        report.violations.append(bad(
            "total_cost",
            f"plan records total {plan.total_cost!r}, trips sum to {length_sum!r}",
        ))
    if inst.Q is not None and len(mem) >= 1:
        lb = lower_bound(inst, mem)
        report.lower_bound = lb
        if lb > 0:
            report.ratio = plan.total_cost / lb
            # the tree term only bounds plans that must visit every vertex,
            # so the floor check needs all non-depot demands positive
            demanded = all(inst.q[u] > 0 for u in range(inst.n) if u not in mem)
            if demanded and report.ratio < 1.0 - BOUND_TOL:
                report.violations.append(bad(
                    "below_lower_bound",
                    f"total {plan.total_cost!r} is below the lower bound {lb!r}",
                ))
        else:
            report.ratio = 1.0 if plan.total_cost <= BOUND_TOL else float("inf")
    return report


def plan_to_dict(inst: Instance, plan: RoutePlan) -> dict:
    """JSON-ready form of a plan, including its lower bound when defined."""
    lb = lower_bound(inst, plan.depots) if inst.Q is not None else None
    return {
        "depots": list(plan.depots),
        "trips": [
            {
                "depot": tr.depot,
                "stops": list(tr.stops),
                "load": tr.load,
                "length": tr.length,
            }
            for tr in plan.trips
        ],
        "total_cost": plan.total_cost,
        "lower_bound": lb,
    }


def plan_from_dict(data: dict) -> RoutePlan:
    """Rebuild a RoutePlan from its JSON form (lower bound is recomputed)."""
    trips = tuple(
        Trip(
            depot=int(tr["depot"]),
            stops=tuple(int(u) for u in tr["stops"]),
            load=float(tr["load"]),
            length=float(tr["length"]),
        )
        for tr in data["trips"]
    )
    return RoutePlan(
        depots=tuple(int(v) for v in data["depots"]),
        trips=trips,
        total_cost=float(data["total_cost"]),
    )
