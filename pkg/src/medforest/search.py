"""Multi-swap local search over depot sets.

The neighborhood of a depot set S is every swap that drops s members
and adds s outside vertices, for s = 1..t. Scans enumerate moves in a
fixed order (size ascending, dropped subset lexicographic, added subset
lexicographic) and pivot on the first improving move, so runs are fully
deterministic given the starting set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from medforest.errors import MedforestError
from medforest.instance import DepotSet, Instance, as_members, make_workspace

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (advanced state, output word)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return state, z


class SeedStream:
    """Deterministic 64-bit stream with unbiased bounded draws."""

    def __init__(self, seed: int):
        self._state = int(seed) & _MASK64

    def next64(self) -> int:
        self._state, z = _splitmix64(self._state)
        return z

    def below(self, bound: int) -> int:
        # rejection sampling keeps the draw unbiased for any bound
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            z = self.next64()
            if z < limit:
                return z % bound


def random_depot_set(n: int, k: int, seed: int) -> tuple[int, ...]:
    """Uniform k-subset of range(n) via a partial Fisher-Yates shuffle."""
    if not 1 <= k <= n:
        raise MedforestError(f"k={k} outside 1..n={n}")
    stream = SeedStream(seed)
    idx = list(range(n))
    for i in range(k):
        j = i + stream.below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    return tuple(sorted(idx[:k]))


@dataclass(frozen=True)
class Objective:
    """Swap-search objective: med plus rho times the tree term."""

    rho: float
    tree_metric: str = "d"

    def __post_init__(self):
        if not (self.rho >= 0 and math.isfinite(self.rho)):
            raise MedforestError(f"rho={self.rho!r} must be finite and nonnegative")
        if self.tree_metric not in ("d", "c"):
            raise MedforestError(f"tree_metric must be 'd' or 'c', got {self.tree_metric!r}")


@dataclass(frozen=True)
class SwapMove:
    """Drop ``drop`` from the set, add ``add``; both sorted, same size."""

    drop: tuple[int, ...]
    add: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.drop)


@dataclass
class TraceStep:
    iteration: int
    drop: tuple[int, ...]
    add: tuple[int, ...]
    phi_before: float
    phi_after: float


@dataclass
class SearchTrace:
    """Everything needed to replay one local-search run."""

    init: tuple[int, ...]
    seed: int | None
    t: int
    delta: float
    phi_initial: float
    phi_final: float
    iterations: int
    termination: str  # 'local_optimum' or 'iteration_cap'
    steps: list[TraceStep] = field(default_factory=list)

    def jsonl(self) -> str:
        """One JSON line per accepted move."""
        lines = [
            json.dumps(
                {
                    "iteration": s.iteration,
                    "drop": list(s.drop),
                    "add": list(s.add),
                    "phi_before": s.phi_before,
                    "phi_after": s.phi_after,
                },
                sort_keys=True,
            )
            for s in self.steps
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def _check_objective(inst: Instance, obj: Objective) -> None:
    if obj.tree_metric == "c" and not inst.has_c:
        raise MedforestError("objective uses tree metric c but the instance has no c")


def phi(inst: Instance, obj: Objective, S) -> float:
    """Objective value med(S) + rho * tree(S) for one depot set."""
    _check_objective(inst, obj)
    mem = as_members(S, inst.n)
    return make_workspace(inst, obj.tree_metric).phi(mem, obj.rho)


def enumerate_swaps(S, n: int, t: int) -> Iterator[SwapMove]:
    """All swap moves in the scan's deterministic order.

    Sizes ascend from 1 to min(t, |S|, n - |S|); within a size, dropped
    subsets run lexicographically over the sorted members, added subsets
    lexicographically over the ascending complement.
    """
    mem = as_members(S, n)
    inside = set(mem)
    comp = [v for v in range(n) if v not in inside]
    for s in range(1, min(t, len(mem), len(comp)) + 1):
        for drop in combinations(mem, s):
            for add in combinations(comp, s):
                yield SwapMove(drop, add)


def default_iteration_cap(n: int, k: int, delta: float) -> int:
    """Hard cap on accepted moves; generous at any sane delta."""
    return math.ceil(10.0 * n * k * math.log(n + 1) / max(delta, 1e-16))


def local_search(
    inst: Instance,
    obj: Objective,
    k: int | None = None,
    t: int = 1,
    delta: float = 1e-7,
    init=None,
    seed: int = 0,
    max_iters: int | None = None,
) -> tuple[DepotSet, SearchTrace]:
    """First-improvement t-swap descent from a given or seeded start.

    A move is accepted iff phi_new < phi_current and
    phi_new * (1 + delta) <= phi_current, so termination is guaranteed
    for delta > 0; ``max_iters`` (default: a generous n,k,delta formula)
    additionally caps the number of accepted moves. Returns the final
    set and a trace whose ``termination`` says whether a true
    delta-local optimum was reached.
    """
    _check_objective(inst, obj)
    k = inst.k if k is None else int(k)
    if not 1 <= k <= inst.n:
        raise MedforestError(f"k={k} outside 1..n={inst.n}")
    if t < 1:
        raise MedforestError(f"swap budget t={t} must be at least 1")
    if delta < 0:
        raise MedforestError(f"delta={delta!r} must be nonnegative")
    if init is not None:
        members = as_members(init, inst.n)
        if len(members) != k:
            raise MedforestError(f"init has {len(members)} members, expected k={k}")
        used_seed = None
    else:
        members = random_depot_set(inst.n, k, seed)
        used_seed = int(seed)

    ws = make_workspace(inst, obj.tree_metric)
    phi_cur = ws.phi(members, obj.rho)
    cap = default_iteration_cap(inst.n, k, delta) if max_iters is None else int(max_iters)
    trace = SearchTrace(
        init=members,
        seed=used_seed,
        t=t,
        delta=delta,
        phi_initial=phi_cur,
        phi_final=phi_cur,
        iterations=0,
        termination="iteration_cap",
    )
    iters = 0
    while True:
        if iters >= cap:
            trace.termination = "iteration_cap"
            break
        found = ws.first_improving(members, obj.rho, t, delta, phi_cur)
        if found is None:
            trace.termination = "local_optimum"
            break
        drop, add, phi_new = found
        members = tuple(sorted((set(members) - set(drop)) | set(add)))
        iters += 1
        trace.steps.append(TraceStep(iters, tuple(drop), tuple(add), phi_cur, phi_new))
        phi_cur = phi_new
    trace.iterations = iters
    trace.phi_final = phi_cur
    return DepotSet.of(members), trace


def is_local_opt(inst: Instance, obj: Objective, S, t: int) -> tuple[bool, SwapMove | None]:
    """Exact local optimality under swaps of size <= t (no delta slack).

    Returns (True, None) or (False, first strictly improving move in
    scan order).
    """
    _check_objective(inst, obj)
    mem = as_members(S, inst.n)
    if t < 1:
        raise MedforestError(f"swap budget t={t} must be at least 1")
    ws = make_workspace(inst, obj.tree_metric)
    phi_cur = ws.phi(mem, obj.rho)
    found = ws.first_improving(mem, obj.rho, t, 0.0, phi_cur)
    if found is None:
        return True, None
    drop, add, _ = found
    return False, SwapMove(tuple(drop), tuple(add))
