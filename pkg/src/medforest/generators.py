"""Instance families: two structured showcases plus seeded random inputs.

``gen_appendix`` builds the six-vertex family whose median, k-tree and
combined optima are pairwise disjoint; ``gen_gap`` builds the paired
two-metric family whose canonical local optimum is a factor w worse
than the global optimum under any swap budget below k; ``gen_random``
draws reproducible metric instances for property tests.
"""

from __future__ import annotations

import numpy as np

from medforest.errors import MedforestError
from medforest.instance import Instance
from medforest.io import euclidean_matrix

RANDOM_KINDS = ("euclidean", "shortest_path_completion")


def gen_appendix(ell: int = 10) -> Instance:
    """Six vertices in two blocks; scale ``ell`` separates the objectives.

    Vertices u0,u1,u2 / v0,v1,v2 with unit demand at u0 and v0 and
    ell^4 elsewhere. Within-block distances are powers of ell; the two
    blocks sit ell^7 apart, far enough that no optimum ever mixes them
    (the choice is recorded in the instance meta). Budget k=4, capacity
    unset, recommended rho = ell^2.
    """
    ell = int(ell)
    if ell < 2:
        raise MedforestError(f"ell={ell} must be an integer >= 2")
    big = float(ell**4)
    cross = float(ell**7)
    q = [1.0, big, big, 1.0, big, big]
    d = np.full((6, 6), cross)
    np.fill_diagonal(d, 0.0)
    d[0, 1] = d[1, 0] = float(ell**3)
    d[0, 2] = d[2, 0] = float(ell**3)
    d[1, 2] = d[2, 1] = float(ell**2)
    d[3, 4] = d[4, 3] = float(ell**4)
    d[3, 5] = d[5, 3] = float(ell**4)
    d[4, 5] = d[5, 4] = float(ell)
    return Instance(
        q=q,
        d=d,
        k=4,
        labels=("u0", "u1", "u2", "v0", "v1", "v2"),
        meta={
            "family": "appendix",
            "ell": ell,
            "cross_distance": cross,
            "rho_recommended": float(ell**2),
        },
    )


def gen_gap(k: int = 4, w: float = 100.0, M: float = 1e6) -> Instance:
    """Paired vertices u_i,1 / u_i,2 with clashing metrics d and c.

    d is zero on the chain pairs {u_i,2, u_i+1,1} and one elsewhere;
    c is zero inside each pair {u_i,1, u_i,2} and M elsewhere. Every
    demand is w except the last second-coordinate vertex, which gets 1.
    Under rho=1 with tree metric c, the all-second-coordinates set is
    locally optimal for swaps up to k-1 at value w while the
    all-first-coordinates set costs 1.
    """
    k = int(k)
    if k < 2:
        raise MedforestError(f"k={k} must be at least 2")
    w = float(w)
    M = float(M)
    if not w >= 1:
        raise MedforestError(f"w={w} must be at least 1")
    if not M > w:
        raise MedforestError(f"M={M} must exceed w={w}")
    n = 2 * k
    # vertex 2*i is u_{i+1,1}, vertex 2*i+1 is u_{i+1,2}
    q = np.full(n, w)
    q[n - 1] = 1.0
    d = np.ones((n, n))
    np.fill_diagonal(d, 0.0)
    for i in range(k - 1):
        a, b = 2 * i + 1, 2 * i + 2
        d[a, b] = d[b, a] = 0.0
    c = np.full((n, n), M)
    np.fill_diagonal(c, 0.0)
    for i in range(k):
        a, b = 2 * i, 2 * i + 1
        c[a, b] = c[b, a] = 0.0
    labels = tuple(
        f"u{i + 1}_{j + 1}" for i in range(k) for j in range(2)
    )
    return Instance(
        q=q,
        d=d,
        k=k,
        c=c,
        labels=labels,
        meta={
            "family": "gap",
            "w": w,
            "M": M,
            "rho": 1.0,
            "tree_metric": "c",
        },
    )


def gap_local_set(k: int) -> tuple[int, ...]:
    """The canonical locally optimal set of gen_gap: all second coordinates."""
    return tuple(2 * i + 1 for i in range(k))


def gap_opt_set(k: int) -> tuple[int, ...]:
    """The global optimum of gen_gap: all first coordinates."""
    return tuple(2 * i for i in range(k))


def gen_random(n: int, seed: int, kind: str = "euclidean", k: int | None = None) -> Instance:
    """Seeded random instance with integer demands in 1..5 and Q = 2*max q.

    ``euclidean``: points uniform in the unit square, distances rounded
    to 1e-12. ``shortest_path_completion``: a sparse connected graph
    with integer weights, completed by all-pairs shortest paths, so
    every distance is a small exact integer.
    """
    n = int(n)
    if n < 1:
        raise MedforestError(f"n={n} must be positive")
    if kind not in RANDOM_KINDS:
        raise MedforestError(f"unknown kind {kind!r}, expected one of {RANDOM_KINDS}")
    k = max(1, min(3, n)) if k is None else int(k)
    rng = np.random.default_rng(seed)
    q = rng.integers(1, 6, size=n).astype(np.float64)
    Q = 2.0 * float(q.max())
    meta = {"family": "random", "kind": kind, "seed": int(seed)}

    if kind == "euclidean":
        points = rng.uniform(0.0, 1.0, size=(n, 2))
        d = euclidean_matrix(points)
        meta["points"] = [[float(x), float(y)] for x, y in points]
    else:
        d = _shortest_path_completion(n, rng)
    return Instance(q=q, d=d, k=k, Q=Q, meta=meta)


def _shortest_path_completion(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random connected integer-weight graph, closed under shortest paths."""
    inf = float("inf")
    d = np.full((n, n), inf)
    np.fill_diagonal(d, 0.0)

    def add_edge(a: int, b: int, w: float) -> None:
        if w < d[a, b]:
            d[a, b] = d[b, a] = w

    for v in range(1, n):
        parent = int(rng.integers(0, v))
        add_edge(parent, v, float(rng.integers(1, 21)))
    for _ in range(n // 2):
        a = int(rng.integers(0, n))
        b = int(rng.integers(0, n))
        if a != b:
            add_edge(a, b, float(rng.integers(1, 21)))
    for mid in range(n):
        np.minimum(d, d[:, mid : mid + 1] + d[mid : mid + 1, :], out=d)
    return d
