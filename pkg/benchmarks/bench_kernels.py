"""Timing comparison between the compiled and pure-Python kernels.

Builds one workspace per backend on seeded random instances, times the
three evaluation primitives and the swap scan, and cross-checks that
both backends return bit-identical values while doing so.

Usage: python3 benchmarks/bench_kernels.py [--sizes 20 60 120] [--repeats 5]
"""

import argparse
import time

from medforest.generators import gen_random
from medforest.search import random_depot_set
from medforest._kernels import purepy

try:
    from medforest._kernels import _speedups
except ImportError:
    _speedups = None

SETS_PER_SIZE = 48


def build_workspaces(inst):
    eu, ev, ew = inst.edge_arrays("d")
    out = {"python": purepy.Workspace(inst.n, inst.q, inst.d, eu, ev, ew)}
    if _speedups is not None:
        out["cython"] = _speedups.Workspace(inst.n, inst.q, inst.d, eu, ev, ew)
    return out


def time_call(fn, args_list, repeats):
    """Best-of-repeats total seconds for one pass over args_list."""
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_size(n, seed, repeats, rows):
    inst = gen_random(n, seed)
    k = max(2, n // 5)
    spaces = build_workspaces(inst)
    sets = [random_depot_set(n, k, seed + i) for i in range(SETS_PER_SIZE)]
    rho = inst.Q / 2.0

    for name, mismatch in (
        ("med", lambda a, b, s: a.med(s) != b.med(s)),
        ("tree", lambda a, b, s: a.tree(s) != b.tree(s)),
        ("phi", lambda a, b, s: a.phi(s, rho) != b.phi(s, rho)),
    ):
        if "cython" in spaces:
            for s in sets:
                if mismatch(spaces["python"], spaces["cython"], s):
                    raise SystemExit(f"backends disagree on {name} at n={n}, set {s}")

    ops = {
        "med": [(s,) for s in sets],
        "tree": [(s,) for s in sets],
        "phi": [(s, rho) for s in sets],
        "swap-scan": [(s, rho, 2, 1e-7, spaces["python"].phi(s, rho))
                      for s in sets[:4]],
    }
    for op, args_list in ops.items():
        row = {"n": n, "op": op, "calls": len(args_list)}
        for backend, ws in spaces.items():
            fn = getattr(ws, "first_improving" if op == "swap-scan" else op)
            total = time_call(fn, args_list, repeats)
            row[backend] = total / len(args_list)
        rows.append(row)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _speedups is None:
        print("compiled backend not importable; timing the fallback only")

    rows = []
    for n in args.sizes:
        bench_size(n, args.seed, args.repeats, rows)

    header = f"{'n':>5} {'op':<10} {'calls':>5} {'python':>12}"
    if _speedups is not None:
        header += f" {'cython':>12} {'speedup':>8}"
    print(header)
    for row in rows:
        line = f"{row['n']:>5} {row['op']:<10} {row['calls']:>5} {row['python'] * 1e6:>10.1f}us"
        if "cython" in row:
            line += f" {row['cython'] * 1e6:>10.1f}us {row['python'] / row['cython']:>7.1f}x"
        print(line)
    if _speedups is not None:
        print("values cross-checked bit-identical on every timed set")


if __name__ == "__main__":
    main()
