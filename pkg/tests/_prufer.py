"""Test-only oracle: minimum spanning cost by enumerating all labeled trees.

Prufer sequences enumerate the m^(m-2) labeled trees on m vertices, so
for tiny m this gives a spanning-tree optimum that shares no code with
the Kruskal path under test. The contracted variant quotients the depot
set to one node and scores quotient edges by the cheapest crossing pair.
"""

from __future__ import annotations

from itertools import product


def prufer_decode(seq: tuple[int, ...], m: int) -> list[tuple[int, int]]:
    """Edges of the labeled tree on 0..m-1 encoded by ``seq``."""
    degree = [1] * m
    for v in seq:
        degree[v] += 1
    edges = []
    leaf_heap = sorted(v for v in range(m) if degree[v] == 1)
    seq_rest = list(seq)
    for v in seq_rest:
        leaf = leaf_heap.pop(0)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            # keep the pool sorted; m is tiny so a linear insert is fine
            i = 0
            while i < len(leaf_heap) and leaf_heap[i] < v:
                i += 1
            leaf_heap.insert(i, v)
    a, b = leaf_heap
    edges.append((a, b))
    return edges


def min_spanning_cost(weight) -> float:
    """Exhaustive MST cost for a complete graph given ``weight[a][b]``."""
    m = len(weight)
    if m == 1:
        return 0.0
    if m == 2:
        return float(weight[0][1])
    best = float("inf")
    for seq in product(range(m), repeat=m - 2):
        cost = sum(float(weight[a][b]) for a, b in prufer_decode(seq, m))
        if cost < best:
            best = cost
    return best


def contracted_min_spanning_cost(d, members) -> float:
    """Exhaustive cost of the MST with ``members`` contracted to one node.

    Quotient node 0 is the contracted set; nodes 1.. are the remaining
    vertices ascending. Parallel edges collapse to their cheapest
    representative, which preserves the spanning optimum.
    """
    n = len(d)
    mem = sorted(set(members))
    rest = [v for v in range(n) if v not in mem]
    m = len(rest) + 1
    weight = [[0.0] * m for _ in range(m)]
    for i, u in enumerate(rest):
        weight[0][i + 1] = weight[i + 1][0] = min(float(d[u][s]) for s in mem)
        for j, v in enumerate(rest):
            if i < j:
                weight[i + 1][j + 1] = weight[j + 1][i + 1] = float(d[u][v])
    return min_spanning_cost(weight)
