"""Pure-Python evaluation kernels.

Fallback backend used when the compiled extension is unavailable. The
compiled twin in ``_speedups.pyx`` performs the same floating-point
operations in the same order, so both backends return bit-identical
values; tests assert this whenever the extension is importable.

Hot paths below are written with inlined loops on plain lists rather
than numpy calls: per-move evaluation dominates the swap search, and
list indexing beats array scalar overhead at desk scales.
"""

from itertools import combinations
from math import inf

BACKEND = "python"


class Workspace:
    """Evaluation state for one (instance, tree metric) pair.

    Holds the demand vector, the service metric, and the tree metric's
    edge list presorted by (length, min endpoint, max endpoint). Not
    thread-safe; build one workspace per thread.
    """

    def __init__(self, n, q, d, eu, ev, ew):
        self.n = int(n)
        self.q = [float(x) for x in q]
        self.d = [[float(x) for x in row] for row in d]
        self.eu = [int(x) for x in eu]
        self.ev = [int(x) for x in ev]
        self.ew = [float(x) for x in ew]
        self._idmap = list(range(self.n))

    def med(self, members):
        """Sum of q[u] * dist(u, members), accumulated over u ascending."""
        acc = 0.0
        mem = list(members)
        for qu, row in zip(self.q, self.d):
            dmin = inf
            for w in mem:
                v = row[w]
                if v < dmin:
                    dmin = v
            acc += qu * dmin
        return acc

    def tree(self, members):
        """Cost of the spanning structure with ``members`` contracted.

        Kruskal over the presorted edge list, with the members seeded
        into one union-find class, accumulating in acceptance order.
        """
        n = self.n
        parent = self._idmap[:]
        mem = list(members)
        # merge the contracted set first
        r0 = mem[0]
        while parent[r0] != r0:
            r0 = parent[r0]
        for x in mem[1:]:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            if x != r0:
                parent[x] = r0
        target = n - len(mem)
        acc = 0.0
        count = 0
        eu, ev, ew = self.eu, self.ev, self.ew
        for i in range(len(ew)):
            if count == target:
                break
            a = eu[i]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = ev[i]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a != b:
                parent[a] = b
                acc += ew[i]
                count += 1
        return acc

    def phi(self, members, rho):
        """Combined objective: med plus rho times the contracted tree cost."""
        return self.med(members) + rho * self.tree(members)

    def first_improving(self, members, rho, t, delta, phi_current):
        """First swap of size <= t that improves phi past the delta margin.

        Moves are enumerated by size s = 1..min(t, |S|, n-|S|), then by
        dropped subset, then by added subset, both lexicographic over
        ascending vertex ids. Returns (drop, add, phi_new) or None. A
        move is accepted iff phi_new < phi_current and
        phi_new * (1 + delta) <= phi_current.
        """
        mem = sorted(members)
        k = len(mem)
        inside = set(mem)
        comp = [v for v in range(self.n) if v not in inside]
        for s in range(1, min(t, k, len(comp)) + 1):
            for drop in combinations(mem, s):
                base = [v for v in mem if v not in drop]
                for add in combinations(comp, s):
                    phi_new = self.phi(base + list(add), rho)
                    if phi_new < phi_current and phi_new * (1.0 + delta) <= phi_current:
                        return drop, add, phi_new
        return None
