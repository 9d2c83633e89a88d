"""Spanning structures: plain MSTs, contracted MSTs, k-tree optima.

All tree costs here and in the kernels accumulate over the same
presorted edge arrays (length, then min endpoint, then max endpoint),
so equal structures always produce bit-identical floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from medforest.errors import MedforestError
from medforest.instance import (
    DepotSet,
    Instance,
    ObjectiveReport,
    as_members,
    make_workspace,
)


class Tree(NamedTuple):
    """A spanning tree: total cost plus edges as (min, max) pairs."""

    cost: float
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ContractedTree:
    """MST of the graph with the depot set contracted to one super-node.

    ``edges`` keeps acceptance order; an edge incident to the contracted
    set is stored as (depot, vertex), any other as (min, max).
    ``attachment`` maps every vertex to the unique depot of its
    component (depots map to themselves).
    """

    depots: tuple[int, ...]
    metric: str
    cost: float
    edges: tuple[tuple[int, int], ...]
    attachment: dict[int, int]

    def component(self, f: int) -> tuple[int, ...]:
        """Vertices attached to depot ``f``, ascending, including ``f``."""
        if f not in self.depots:
            raise MedforestError(f"vertex {f} is not a depot of this tree")
        return tuple(v for v in sorted(self.attachment) if self.attachment[v] == f)


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _kruskal(n, eu, ev, ew, merged=()):
    """Kruskal over presorted edges, optionally pre-merging ``merged``.

    Returns (cost, accepted edge index list). Cost accumulates in
    acceptance order, matching the kernel tree evaluation exactly.
    """
    parent = list(range(n))
    if merged:
        r0 = _find(parent, merged[0])
        for x in merged[1:]:
            r = _find(parent, x)
            if r != r0:
                parent[r] = r0
        target = n - len(merged)
    else:
        target = n - 1
    acc = 0.0
    picked: list[int] = []
    for i in range(len(ew)):
        if len(picked) == target:
            break
        a = _find(parent, int(eu[i]))
        b = _find(parent, int(ev[i]))
        if a != b:
            parent[a] = b
            acc += float(ew[i])
            picked.append(i)
    if len(picked) < target:
        raise MedforestError("edge list does not span the instance")
    return acc, picked


def mst(inst: Instance, metric: str = "d") -> Tree:
    """Minimum spanning tree of the whole vertex set."""
    eu, ev, ew = inst.edge_arrays(metric)
    cost, picked = _kruskal(inst.n, eu, ev, ew)
    return Tree(cost, tuple((int(eu[i]), int(ev[i])) for i in picked))


def tree_cost(inst: Instance, S, metric: str = "d") -> float:
    """Cost of the contracted MST, via the kernel evaluation path."""
    return make_workspace(inst, metric).tree(as_members(S, inst.n))


def contracted_mst(inst: Instance, S, metric: str = "d") -> ContractedTree:
    """Contracted MST with full structure (edges, attachment map)."""
    mem = as_members(S, inst.n)
    eu, ev, ew = inst.edge_arrays(metric)
    cost, picked = _kruskal(inst.n, eu, ev, ew, merged=mem)

    inside = set(mem)
    edges = []
    parent = list(range(inst.n))
    for i in picked:
        a, b = int(eu[i]), int(ev[i])
        edges.append((a, b) if b not in inside else (b, a))
        ra, rb = _find(parent, a), _find(parent, b)
        parent[ra] = rb
    attachment = {}
    depot_of_root = {}
    for f in mem:
        root = _find(parent, f)
        if root in depot_of_root:
            raise MedforestError("internal: two depots share a contracted component")
        depot_of_root[root] = f
    for v in range(inst.n):
        root = _find(parent, v)
        f = depot_of_root.get(root)
        if f is None:
            raise MedforestError("internal: vertex not attached to any depot")
        attachment[v] = f
    return ContractedTree(mem, metric, cost, tuple(edges), attachment)


def ktree_opt(inst: Instance, k: int | None = None, metric: str = "d") -> tuple[DepotSet, float]:
    """Best depot set for the pure connectivity objective.

    Drops the k-1 heaviest MST edges (last in the presorted order among
    the tree's edges, so ties stay deterministic) and opens the lowest
    vertex of each remaining component. The returned cost equals
    tree_cost at the returned set, which is the global optimum.
    """
    k = inst.k if k is None else int(k)
    if not 1 <= k <= inst.n:
        raise MedforestError(f"k={k} outside 1..n={inst.n}")
    eu, ev, ew = inst.edge_arrays(metric)
    _, picked = _kruskal(inst.n, eu, ev, ew)
    # picked is ascending in (length, endpoints); keep the lightest n-k
    kept = picked[: inst.n - k]
    parent = list(range(inst.n))
    for i in kept:
        a, b = _find(parent, int(eu[i])), _find(parent, int(ev[i]))
        parent[a] = b
    rep: dict[int, int] = {}
    for v in range(inst.n):
        root = _find(parent, v)
        if root not in rep or v < rep[root]:
            rep[root] = v
    depots = DepotSet.of(sorted(rep.values()))
    return depots, tree_cost(inst, depots, metric)


def euler_tour(tree: ContractedTree, f: int) -> list[int]:
    """Preorder walk of depot ``f``'s component, children ascending."""
    if f not in tree.depots:
        raise MedforestError(f"vertex {f} is not a depot of this tree")
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
        stack.extend(sorted(adj.get(v, ()), reverse=True))
    return order


def objective_report(inst: Instance, S) -> ObjectiveReport:
    """Costs of one depot set under every objective the instance supports."""
    mem = as_members(S, inst.n)
    ws = make_workspace(inst, "d")
    med = ws.med(mem)
    tree_d = ws.tree(mem)
    tree_c = make_workspace(inst, "c").tree(mem) if inst.has_c else tree_d
    flow = med * (2.0 / inst.Q) if inst.Q is not None else None
    return ObjectiveReport(med=med, flow=flow, tree_d=tree_d, tree_c=tree_c)
