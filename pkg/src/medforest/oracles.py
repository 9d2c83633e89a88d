"""Exhaustive reference computations.

Everything here scans the full solution space and is guarded against
combinatorial blowups; these are the certificates the fast paths are
tested against, so none of them reuse the code they certify beyond the
shared single-set evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from medforest.errors import GuardExceededError, MedforestError, UnsplitInfeasibleError
from medforest.instance import Instance, as_members, make_workspace

SUBSET_GUARD = 10_000_000
CVRP_CUSTOMER_GUARD = 8

# relative tolerance for collecting argmin ties
ARGMIN_RTOL = 1e-12

_OBJECTIVES = ("median", "ktree", "kmf")


@dataclass(frozen=True)
class OracleResult:
    """Optimum of one objective over all k-subsets, with every argmin."""

    objective: str
    rho: float | None
    tree_metric: str
    opt_value: float
    argmins: tuple[tuple[int, ...], ...]
    subsets_scanned: int


def _guard_subsets(n: int, k: int) -> int:
    count = math.comb(n, k)
    if count > SUBSET_GUARD:
        raise GuardExceededError(
            f"C({n},{k}) = {count} subsets exceeds the oracle guard of {SUBSET_GUARD}",
            count=count,
            limit=SUBSET_GUARD,
        )
    return count


def brute_subset_opt(
    inst: Instance,
    k: int | None = None,
    objective: str = "kmf",
    rho: float | None = None,
    tree_metric: str = "d",
) -> OracleResult:
    """Scan every k-subset and return the optimum with all argmins.

    Ties are collected within relative tolerance 1e-12 of the optimum.
    Subsets are enumerated lexicographically, so argmin order is
    deterministic.
    """
    if objective not in _OBJECTIVES:
        raise MedforestError(f"unknown objective {objective!r}, expected one of {_OBJECTIVES}")
    k = inst.k if k is None else int(k)
    if not 1 <= k <= inst.n:
        raise MedforestError(f"k={k} outside 1..n={inst.n}")
    count = _guard_subsets(inst.n, k)
    if objective == "kmf":
        if rho is None:
            raise MedforestError("objective 'kmf' needs rho")
        rho = float(rho)
    else:
        rho = None

    ws = make_workspace(inst, tree_metric if objective != "median" else "d")
    if objective == "median":
        evaluate = ws.med
    elif objective == "ktree":
        evaluate = ws.tree
    else:
        evaluate = lambda mem: ws.phi(mem, rho)  # noqa: E731

    best = math.inf
    near: list[tuple[float, tuple[int, ...]]] = []
    for mem in combinations(range(inst.n), k):
        val = evaluate(mem)
        if val < best:
            best = val
            keep = best * (1.0 + ARGMIN_RTOL)
            near = [(v, m) for v, m in near if v <= keep]
        if val <= best * (1.0 + ARGMIN_RTOL):
            near.append((val, mem))
    argmins = tuple(m for v, m in near if v <= best * (1.0 + ARGMIN_RTOL))
    return OracleResult(
        objective=objective,
        rho=rho,
        tree_metric=tree_metric if objective != "median" else "d",
        opt_value=best,
        argmins=argmins,
        subsets_scanned=count,
    )


def brute_cvrp(inst: Instance, S, customer_guard: int = CVRP_CUSTOMER_GUARD) -> float:
    """Exact optimal unsplit routing cost from fixed depots.

    Held-Karp path tables per depot give each customer subset its best
    single-trip cost; a partition DP over subsets then assembles the
    optimal fleet. Guarded to at most ``customer_guard`` (default 8)
    positive-demand non-depot customers.
    """
    if inst.Q is None or inst.Q <= 0:
        raise MedforestError("brute_cvrp needs a positive capacity Q")
    mem = as_members(S, inst.n)
    Q = float(inst.Q)
    cust = [u for u in range(inst.n) if u not in mem and inst.q[u] > 0]
    m = len(cust)
    if m > customer_guard:
        raise GuardExceededError(
            f"{m} customers exceed the brute_cvrp guard of {customer_guard}",
            count=m,
            limit=customer_guard,
        )
    for u in cust:
        if inst.q[u] > Q:
            raise UnsplitInfeasibleError(
                f"demand q[{u}]={inst.q[u]!r} exceeds capacity Q={Q!r}"
            )
    if m == 0:
        return 0.0

    d = inst.d
    full = (1 << m) - 1
    load = [0.0] * (full + 1)
    for mask in range(1, full + 1):
        low = (mask & -mask).bit_length() - 1
        load[mask] = load[mask ^ (1 << low)] + float(inst.q[cust[low]])

    # best single-trip cost per customer subset, minimized over depots
    part_cost = [math.inf] * (full + 1)
    for f in mem:
        dp = [[math.inf] * m for _ in range(full + 1)]
        for i in range(m):
            dp[1 << i][i] = float(d[f, cust[i]])
        for mask in range(1, full + 1):
            row = dp[mask]
            for i in range(m):
                cur = row[i]
                if cur == math.inf or not mask & (1 << i):
                    continue
                for j in range(m):
                    if mask & (1 << j):
                        continue
                    nxt = mask | (1 << j)
                    cand = cur + float(d[cust[i], cust[j]])
                    if cand < dp[nxt][j]:
                        dp[nxt][j] = cand
        for mask in range(1, full + 1):
            row = dp[mask]
            for i in range(m):
                if mask & (1 << i) and row[i] < math.inf:
                    cand = row[i] + float(d[cust[i], f])
                    if cand < part_cost[mask]:
                        part_cost[mask] = cand

    best = [math.inf] * (full + 1)
    best[0] = 0.0
    for mask in range(1, full + 1):
        low_bit = 1 << ((mask & -mask).bit_length() - 1)
        sub = mask
        while sub:
            if sub & low_bit and load[sub] <= Q and best[mask ^ sub] < math.inf:
                cand = best[mask ^ sub] + part_cost[sub]
                if cand < best[mask]:
                    best[mask] = cand
            sub = (sub - 1) & mask
    if best[full] == math.inf:
        raise UnsplitInfeasibleError("no feasible unsplit partition exists")
    return best[full]


@dataclass(frozen=True)
class DivergencePair:
    """How the argmin families of two objectives relate."""

    first: str
    second: str
    intersects: bool
    min_symmetric_difference: int


@dataclass(frozen=True)
class DivergenceReport:
    median: OracleResult
    ktree: OracleResult
    kmf: OracleResult
    pairs: tuple[DivergencePair, ...]

    def to_dict(self) -> dict:
        def res(r: OracleResult) -> dict:
            return {
                "objective": r.objective,
                "rho": r.rho,
                "tree_metric": r.tree_metric,
                "opt_value": r.opt_value,
                "argmins": [list(m) for m in r.argmins],
                "subsets_scanned": r.subsets_scanned,
            }

        return {
            "median": res(self.median),
            "ktree": res(self.ktree),
            "kmf": res(self.kmf),
            "pairs": [
                {
                    "first": p.first,
                    "second": p.second,
                    "intersects": p.intersects,
                    "min_symmetric_difference": p.min_symmetric_difference,
                }
                for p in self.pairs
            ],
        }


def divergence_report(
    inst: Instance,
    k: int | None = None,
    rho: float | None = None,
    tree_metric: str = "d",
) -> DivergenceReport:
    """Compare the argmin families of median, ktree, and kmf objectives.

    For each pair of families the report says whether they share a
    subset and the minimum symmetric difference across their members.
    """
    if rho is None:
        raise MedforestError("divergence_report needs rho for the kmf objective")
    med = brute_subset_opt(inst, k, "median")
    ktr = brute_subset_opt(inst, k, "ktree", tree_metric=tree_metric)
    kmf = brute_subset_opt(inst, k, "kmf", rho=rho, tree_metric=tree_metric)
    by_name = {"median": med, "ktree": ktr, "kmf": kmf}
    pairs = []
    for a, b in (("median", "ktree"), ("median", "kmf"), ("ktree", "kmf")):
        fam_a = {frozenset(mm) for mm in by_name[a].argmins}
        fam_b = {frozenset(mm) for mm in by_name[b].argmins}
        pairs.append(DivergencePair(
            first=a,
            second=b,
            intersects=bool(fam_a & fam_b),
            min_symmetric_difference=min(
                len(x ^ y) for x in fam_a for y in fam_b
            ),
        ))
    return DivergenceReport(median=med, ktree=ktr, kmf=kmf, pairs=tuple(pairs))


def exhaustive_routing_lb(inst: Instance, k: int | None = None) -> tuple[float, tuple[int, ...]]:
    """min over all k-subsets of max(flow_cost, tree_cost): the global bound."""
    if inst.Q is None or inst.Q <= 0:
        raise MedforestError("the routing lower bound needs a positive capacity Q")
    k = inst.k if k is None else int(k)
    if not 1 <= k <= inst.n:
        raise MedforestError(f"k={k} outside 1..n={inst.n}")
    _guard_subsets(inst.n, k)
    ws = make_workspace(inst, "d")
    factor = 2.0 / inst.Q
    best = math.inf
    best_mem: tuple[int, ...] = ()
    for mem in combinations(range(inst.n), k):
        flow = ws.med(mem) * factor
        tree = ws.tree(mem)
        val = flow if flow > tree else tree
        if val < best:
            best = val
            best_mem = mem
    return best, best_mem
