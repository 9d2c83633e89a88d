# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Mirrors purepy.py operation for operation: identical accumulation
order, identical acceptance rule, identical move enumeration. The two
backends must return bit-identical floats; see tests/test_kernels.py.
Built with -ffp-contract=off so no FMA contraction changes rounding.
"""

import numpy as np

BACKEND = "compiled"

cdef extern from "math.h":
    double INFINITY


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef class Workspace:
    """Evaluation state for one (instance, tree metric) pair.

    Not thread-safe (owns scratch buffers); build one per thread. The
    scan loops release the GIL, so restart threads run in parallel.
    """

    cdef int n, m
    cdef double[::1] q
    cdef double[:, ::1] d
    cdef int[::1] eu
    cdef int[::1] ev
    cdef double[::1] ew
    cdef int[::1] _parent
    cdef int[::1] _mem
    cdef int[::1] _newmem
    cdef int[::1] _comp
    cdef int[::1] _didx
    cdef int[::1] _aidx
    cdef unsigned char[::1] _inside

    def __init__(self, n, q, d, eu, ev, ew):
        # copies: inputs may be read-only views, memoryviews need writable
        self.n = int(n)
        self.q = np.array(q, dtype=np.float64, order="C", copy=True)
        self.d = np.array(d, dtype=np.float64, order="C", copy=True)
        self.eu = np.array(eu, dtype=np.intc, order="C", copy=True)
        self.ev = np.array(ev, dtype=np.intc, order="C", copy=True)
        self.ew = np.array(ew, dtype=np.float64, order="C", copy=True)
        self.m = self.ew.shape[0]
        self._parent = np.empty(self.n, dtype=np.intc)
        self._mem = np.empty(self.n, dtype=np.intc)
        self._newmem = np.empty(self.n, dtype=np.intc)
        self._comp = np.empty(self.n, dtype=np.intc)
        self._didx = np.empty(self.n, dtype=np.intc)
        self._aidx = np.empty(self.n, dtype=np.intc)
        self._inside = np.zeros(self.n, dtype=np.uint8)

    cdef double _med(self, int* mem, int k) noexcept nogil:
        cdef double acc = 0.0, dmin, v
        cdef int u, j
        for u in range(self.n):
            dmin = INFINITY
            for j in range(k):
                v = self.d[u, mem[j]]
                if v < dmin:
                    dmin = v
            acc += self.q[u] * dmin
        return acc

    cdef double _tree(self, int* mem, int k) noexcept nogil:
        cdef int* parent = &self._parent[0]
        cdef int i, a, b, r0, target, count
        cdef double acc = 0.0
        for i in range(self.n):
            parent[i] = i
        r0 = _find(parent, mem[0])
        for i in range(1, k):
            a = _find(parent, mem[i])
            if a != r0:
                parent[a] = r0
        target = self.n - k
        count = 0
        for i in range(self.m):
            if count == target:
                break
            a = _find(parent, self.eu[i])
            b = _find(parent, self.ev[i])
            if a != b:
                parent[a] = b
                acc += self.ew[i]
                count += 1
        return acc

    cdef int _fill(self, members) except -1:
        cdef int k = 0
        for v in members:
            self._mem[k] = v
            k += 1
        return k

    def med(self, members):
        """Sum of q[u] * dist(u, members), accumulated over u ascending."""
        cdef int k = self._fill(members)
        cdef double out
        with nogil:
            out = self._med(&self._mem[0], k)
        return out

    def tree(self, members):
        """Cost of the spanning structure with ``members`` contracted."""
        cdef int k = self._fill(members)
        cdef double out
        with nogil:
            out = self._tree(&self._mem[0], k)
        return out

    def phi(self, members, double rho):
        """Combined objective: med plus rho times the contracted tree cost."""
        cdef int k = self._fill(members)
        cdef double out
        with nogil:
            out = self._med(&self._mem[0], k) + rho * self._tree(&self._mem[0], k)
        return out

    def first_improving(self, members, double rho, int t, double delta,
                        double phi_current):
        """First swap of size <= t improving phi past the delta margin.

        Same enumeration order and acceptance rule as the pure backend:
        sizes ascending, dropped subset lexicographic over the sorted
        members, added subset lexicographic over the ascending
        complement; accept iff phi_new < phi_current and
        phi_new * (1 + delta) <= phi_current.
        """
        cdef int k = 0, csize = 0, n = self.n
        cdef int i, j, s, smax, pos, found, done, s_found
        cdef double phi_new = 0.0
        cdef int* mem = &self._mem[0]
        cdef int* newmem = &self._newmem[0]
        cdef int* comp = &self._comp[0]
        cdef int* didx = &self._didx[0]
        cdef int* aidx = &self._aidx[0]
        cdef unsigned char* inside = &self._inside[0]

        for v in sorted(members):
            mem[k] = v
            k += 1
        for i in range(n):
            inside[i] = 0
        for i in range(k):
            inside[mem[i]] = 1
        for i in range(n):
            if not inside[i]:
                comp[csize] = i
                csize += 1

        smax = t
        if k < smax:
            smax = k
        if csize < smax:
            smax = csize
        found = 0
        s_found = 0
        with nogil:
            for s in range(1, smax + 1):
                if found:
                    break
                for i in range(s):
                    didx[i] = i
                while True:
                    # newmem = members minus dropped positions; adds go on the end
                    pos = 0
                    j = 0
                    for i in range(k):
                        if j < s and didx[j] == i:
                            j += 1
                        else:
                            newmem[pos] = mem[i]
                            pos += 1
                    for i in range(s):
                        aidx[i] = i
                    while True:
                        for i in range(s):
                            newmem[k - s + i] = comp[aidx[i]]
                        phi_new = self._med(newmem, k) + rho * self._tree(newmem, k)
                        if phi_new < phi_current and phi_new * (1.0 + delta) <= phi_current:
                            found = 1
                            s_found = s
                            break
                        # advance the add combination
                        done = 1
                        for i in range(s - 1, -1, -1):
                            if aidx[i] != i + csize - s:
                                aidx[i] += 1
                                for j in range(i + 1, s):
                                    aidx[j] = aidx[j - 1] + 1
                                done = 0
                                break
                        if done:
                            break
                    if found:
                        break
                    # advance the drop combination
                    done = 1
                    for i in range(s - 1, -1, -1):
                        if didx[i] != i + k - s:
                            didx[i] += 1
                            for j in range(i + 1, s):
                                didx[j] = didx[j - 1] + 1
                            done = 0
                            break
                    if done:
                        break
        if not found:
            return None
        drop = tuple(mem[didx[i]] for i in range(s_found))
        add = tuple(comp[aidx[i]] for i in range(s_found))
        return drop, add, phi_new
