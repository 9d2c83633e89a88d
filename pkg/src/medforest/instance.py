"""Instances, depot sets, validation, and the basic cost functions.

An instance couples a finite pseudometric (matrix ``d``), per-vertex
demands ``q``, a depot budget ``k``, an optional vehicle capacity ``Q``
and an optional second matrix ``c`` used as an alternative tree metric.
Structural problems (mismatched shapes) raise at construction; every
semantic property (symmetry, triangle inequality, demand bounds, ...)
is reported by :func:`validate_instance` and never raised, so callers
decide what to tolerate.

Instances are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from medforest import _kernels
from medforest.errors import MedforestError

# absolute tolerance for metric validation
TOL = 1e-9
# relative tolerance used when collecting argmin families
ARGMIN_RTOL = 1e-12

_WITNESS_CAP = 20


@dataclass(frozen=True, eq=False)
class Instance:
    """One routing/location instance. Immutable after construction."""

    q: np.ndarray
    d: np.ndarray
    k: int
    Q: float | None = None
    c: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict)
    _edge_cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        d = np.array(self.d, dtype=np.float64)
        if q.ndim != 1:
            raise ValueError("q must be a one-dimensional demand vector")
        n = q.shape[0]
        if n == 0:
            raise ValueError("instance needs at least one vertex")
        if d.shape != (n, n):
            raise ValueError(f"d has shape {d.shape}, expected ({n}, {n})")
        c = self.c
        if c is not None:
            c = np.array(c, dtype=np.float64)
            if c.shape != (n, n):
                raise ValueError(f"c has shape {c.shape}, expected ({n}, {n})")
            c.flags.writeable = False
        labels = self.labels
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise ValueError(f"{len(labels)} labels for {n} vertices")
        q.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "Q", None if self.Q is None else float(self.Q))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def has_c(self) -> bool:
        return self.c is not None

    def matrix(self, metric: str = "d") -> np.ndarray:
        if metric == "d":
            return self.d
        if metric == "c":
            if self.c is None:
                raise MedforestError("instance has no c matrix")
            return self.c
        raise MedforestError(f"unknown metric {metric!r} (expected 'd' or 'c')")

    def edge_arrays(self, metric: str = "d"):
        """All i<j edges of the chosen metric, presorted for Kruskal.

        Returns (eu, ev, ew) sorted by (length, min endpoint, max
        endpoint). Arrays are cached, read-only and shared; every
        consumer that accumulates tree costs walks them in this order,
        which is what makes tree costs reproducible bit for bit.
        """
        cached = self._edge_cache.get(metric)
        if cached is None:
            m = self.matrix(metric)
            iu, iv = np.triu_indices(self.n, 1)
            w = np.ascontiguousarray(m[iu, iv])
            order = np.lexsort((iv, iu, w))
            eu = np.ascontiguousarray(iu[order], dtype=np.intc)
            ev = np.ascontiguousarray(iv[order], dtype=np.intc)
            ew = np.ascontiguousarray(w[order])
            for arr in (eu, ev, ew):
                arr.flags.writeable = False
            cached = (eu, ev, ew)
            self._edge_cache[metric] = cached
        return cached

    def __repr__(self) -> str:
        cap = "None" if self.Q is None else f"{self.Q:g}"
        return f"Instance(n={self.n}, k={self.k}, Q={cap}, c={'yes' if self.has_c else 'no'})"


@dataclass(frozen=True)
class DepotSet:
    """A set of open depot vertices in canonical (sorted, unique) form."""

    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted({int(v) for v in self.members}))
        if not mem:
            raise MedforestError("empty depot set")
        if mem[0] < 0:
            raise MedforestError(f"negative vertex id {mem[0]} in depot set")
        object.__setattr__(self, "members", mem)

    @classmethod
    def of(cls, members: Iterable[int]) -> "DepotSet":
        return cls(tuple(members))

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members


def as_members(S, n: int | None = None) -> tuple[int, ...]:
    """Normalize a DepotSet or iterable of vertex ids, range-checked."""
    if isinstance(S, DepotSet):
        mem = S.members
    else:
        mem = tuple(sorted({int(v) for v in S}))
    if not mem:
        raise MedforestError("empty depot set")
    if mem[0] < 0 or (n is not None and mem[-1] >= n):
        raise MedforestError(f"depot set {mem} out of range for n={n}")
    return mem


def make_workspace(inst: Instance, tree_metric: str = "d"):
    """Fresh kernel workspace for ``inst``. One per thread; not shared."""
    eu, ev, ew = inst.edge_arrays(tree_metric)
    return _kernels.make_workspace(inst.n, inst.q, inst.d, eu, ev, ew)


@dataclass(frozen=True)
class Violation:
    """One validation finding: a kind tag, a message, and a witness."""

    kind: str
    message: str
    witness: tuple = ()


@dataclass
class ValidationReport:
    """Outcome of validate_instance: hard violations plus informational notes."""

    violations: list[Violation] = field(default_factory=list)
    notes: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"violation[{v.kind}] {v.message}" for v in self.violations]
        out += [f"note[{v.kind}] {v.message}" for v in self.notes]
        return out or ["ok"]


def _check_matrix(name: str, m: np.ndarray, report: ValidationReport) -> None:
    n = m.shape[0]
    asym = np.argwhere(np.abs(m - m.T) > TOL)
    for i, j in asym[:_WITNESS_CAP]:
        if i < j:
            report.violations.append(Violation(
                f"{name}_asymmetric",
                f"{name}[{i},{j}]={m[i, j]!r} differs from {name}[{j},{i}]={m[j, i]!r}",
                (int(i), int(j)),
            ))
    bad_diag = np.argwhere(np.abs(np.diag(m)) > TOL).ravel()
    for i in bad_diag[:_WITNESS_CAP]:
        report.violations.append(Violation(
            f"{name}_diagonal", f"{name}[{i},{i}]={m[i, i]!r} is not zero", (int(i),)
        ))
    neg = np.argwhere(m < -TOL)
    for i, j in neg[:_WITNESS_CAP]:
        report.violations.append(Violation(
            f"{name}_negative", f"{name}[{i},{j}]={m[i, j]!r} is negative", (int(i), int(j))
        ))
    # triangle inequality, one intermediate vertex at a time
    listed = 0
    total = 0
    for mid in range(n):
        slack = m - (m[:, mid:mid + 1] + m[mid:mid + 1, :])
        bad = np.argwhere(slack > TOL)
        total += len(bad)
        for i, j in bad:
            if listed >= _WITNESS_CAP:
                break
            report.violations.append(Violation(
                f"{name}_triangle",
                f"{name}[{i},{j}]={m[i, j]!r} exceeds {name}[{i},{mid}]+{name}[{mid},{j}]"
                f"={m[i, mid] + m[mid, j]!r}",
                (int(i), int(mid), int(j)),
            ))
            listed += 1
    if total > listed:
        report.notes.append(Violation(
            f"{name}_triangle", f"{total - listed} further triangle violations suppressed"
        ))
    zero = np.argwhere((m <= TOL) & ~np.eye(n, dtype=bool))
    if len(zero):
        i, j = zero[0]
        report.notes.append(Violation(
            f"{name}_pseudometric",
            f"{len(zero) // 2} off-diagonal zero pairs in {name} "
            f"(e.g. {name}[{i},{j}]); distinct vertices at distance zero are allowed",
            (int(i), int(j)),
        ))


def validate_instance(inst: Instance) -> ValidationReport:
    """Check every instance invariant and report; never raises, never repairs."""
    report = ValidationReport()
    n = inst.n
    if not 1 <= inst.k <= n:
        report.violations.append(Violation(
            "k_range", f"k={inst.k} outside 1..n={n}", (inst.k,)
        ))
    if inst.Q is not None and inst.Q <= 0:
        report.violations.append(Violation("capacity", f"Q={inst.Q!r} is not positive"))
    neg_q = np.argwhere(inst.q < 0).ravel()
    for u in neg_q[:_WITNESS_CAP]:
        report.violations.append(Violation(
            "demand_negative", f"q[{u}]={inst.q[u]!r} is negative", (int(u),)
        ))
    if inst.Q is not None and inst.Q > 0:
        over = np.argwhere(inst.q > inst.Q).ravel()
        for u in over[:_WITNESS_CAP]:
            report.violations.append(Violation(
                "demand_exceeds_capacity",
                f"q[{u}]={inst.q[u]!r} exceeds Q={inst.Q!r}; unsplit service impossible",
                (int(u),),
            ))
    _check_matrix("d", inst.d, report)
    if inst.c is not None:
        _check_matrix("c", inst.c, report)
    return report


def dist_to_set(inst: Instance, u: int, S) -> float:
    """Distance from vertex ``u`` to the nearest member of ``S``."""
    mem = as_members(S, inst.n)
    row = inst.d[u]
    best = float("inf")
    for w in mem:
        v = row[w]
        if v < best:
            best = v
    return float(best)


def nearest_in_set(inst: Instance, u: int, S) -> tuple[int, float]:
    """Nearest member of ``S`` to ``u``; ties go to the lowest vertex id."""
    mem = as_members(S, inst.n)
    row = inst.d[u]
    best_w = mem[0]
    best = float(row[best_w])
    for w in mem[1:]:
        v = float(row[w])
        if v < best:
            best, best_w = v, w
    return best_w, best


def med_cost(inst: Instance, S) -> float:
    """Total demand-weighted service distance: sum of q[u] * d(u, S)."""
    mem = as_members(S, inst.n)
    return make_workspace(inst).med(mem)


def flow_cost(inst: Instance, S) -> float:
    """Capacity-normalized service lower bound: (2/Q) * med_cost.

    Computed as med_cost scaled once, so flow_cost == med_cost * (2/Q)
    holds bit for bit.
    """
    if inst.Q is None:
        raise MedforestError("capacity Q is unset; flow cost undefined")
    return med_cost(inst, S) * (2.0 / inst.Q)


@dataclass(frozen=True)
class ObjectiveReport:
    """Cost summary of one depot set under every supported objective."""

    med: float
    flow: float | None
    tree_d: float
    tree_c: float

    def phi(self, rho: float, tree_metric: str = "d") -> float:
        tree = self.tree_d if tree_metric == "d" else self.tree_c
        return self.med + rho * tree


class ConsistencyWitness(NamedTuple):
    """Edge pair proving d/c rank disagreement: d_low < d_high, c_low > c_high."""

    edge_low: tuple[int, int]
    edge_high: tuple[int, int]
    d_low: float
    d_high: float
    c_low: float
    c_high: float


def consistency_check(inst: Instance) -> tuple[bool, ConsistencyWitness | None]:
    """Whether the edge rankings of d and c agree.

    Consistent means no edge pair has strictly smaller d but strictly
    larger c; ties in either matrix impose no constraint. Returns the
    first witnessing pair (in d-sorted edge order) when inconsistent.
    """
    if inst.c is None:
        raise MedforestError("consistency check needs a c matrix")
    eu, ev, ew = inst.edge_arrays("d")
    cmat = inst.c
    max_c = -np.inf
    max_edge = None
    i = 0
    m = len(ew)
    while i < m:
        # one group of equal-d edges at a time
        j = i
        while j < m and ew[j] == ew[i]:
            j += 1
        # compare this group against the running max over strictly smaller d
        for idx in range(i, j):
            cv = float(cmat[eu[idx], ev[idx]])
            if max_edge is not None and max_c > cv:
                lo_u, lo_v = max_edge
                return False, ConsistencyWitness(
                    (lo_u, lo_v), (int(eu[idx]), int(ev[idx])),
                    float(inst.d[lo_u, lo_v]), float(ew[idx]),
                    max_c, cv,
                )
        # only then fold the group into the running max (ties are unconstrained)
        for idx in range(i, j):
            cv = float(cmat[eu[idx], ev[idx]])
            if max_edge is None or cv > max_c:
                max_c = cv
                max_edge = (int(eu[idx]), int(ev[idx]))
        i = j
    return True, None
