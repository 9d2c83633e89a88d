"""Command-line interface.

Machine-readable JSON goes to --out or stdout; human summaries go to
stderr. Exit codes: 0 success, 1 usage or unservable request, 2 I/O or
parse failure, 3 exhaustive guard exceeded, 4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from medforest import __version__
from medforest.errors import GuardExceededError, MedforestError, ParseError
from medforest.generators import (
    RANDOM_KINDS,
    gap_local_set,
    gen_appendix,
    gen_gap,
    gen_random,
)
from medforest.instance import consistency_check, validate_instance
from medforest.io import dumps, instance_to_dict, read_instance, write_instance
from medforest.mst import objective_report
from medforest.oracles import brute_subset_opt
from medforest.pipeline import (
    DEFAULT_RESTARTS,
    solve_bicriteria,
    solve_klocvrp,
    solve_ktree,
    solve_objective,
)
from medforest.routing import lower_bound, plan_from_dict, validate_plan
from medforest.search import Objective, is_local_opt, phi
from medforest.tsplib import import_tsplib_cvrp

TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict) -> None:
    text = dumps(payload)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _default_threads() -> int:
    raw = os.environ.get("MEDFOREST_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cmd_gen(args) -> int:
    if args.kind == "appendix":
        inst = gen_appendix(ell=args.ell)
    elif args.kind == "gap":
        inst = gen_gap(k=args.k if args.k is not None else 4, w=args.w, M=args.M)
    else:
        inst = gen_random(args.n, args.seed, kind=args.random_kind, k=args.k)
    report = validate_instance(inst)
    if args.out:
        write_instance(args.out, inst)
    else:
        sys.stdout.write(dumps(instance_to_dict(inst)))
    _say(f"generated {args.kind} instance: n={inst.n} k={inst.k} Q={inst.Q}")
    for line in report.lines():
        if line != "ok":
            _say(f"  {line}")
    return 0


def _cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    threads = args.threads if args.threads is not None else _default_threads()
    common = dict(
        t=args.t, delta=args.delta, restarts=args.restarts, seed=args.seed,
        threads=threads,
    )
    if args.mode == "locvrp":
        res = solve_klocvrp(inst, depot_policy=args.depot_policy, **common)
    elif args.mode == "bicriteria":
        res = solve_bicriteria(inst, depot_policy=args.depot_policy, **common)
    elif args.mode == "kmf":
        if args.rho is None:
            raise MedforestError("--mode kmf needs --rho")
        res = solve_objective(
            inst, Objective(args.rho, args.tree_metric), "kmf", **common
        )
    elif args.mode == "kmedian":
        res = solve_objective(inst, Objective(0.0, "d"), "kmedian", **common)
    else:
        res = solve_ktree(inst, args.tree_metric)

    trace_file = None
    if args.trace and res.best_trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(res.best_trace.jsonl())
        trace_file = args.trace
    _emit(args, res.to_dict(inst, trace_file=trace_file))
    cost = res.plan.total_cost if res.plan is not None else res.phi
    _say(
        f"mode={res.mode} depots={list(res.depots)} cost={cost}"
        + (f" ratio={res.ratio:.6g}" if res.ratio is not None else "")
    )
    return 0


def _cmd_oracle(args) -> int:
    inst = read_instance(args.instance)
    res = brute_subset_opt(
        inst, objective=args.objective, rho=args.rho, tree_metric=args.tree_metric
    )
    _emit(args, {
        "objective": res.objective,
        "rho": res.rho,
        "tree_metric": res.tree_metric,
        "opt_value": res.opt_value,
        "argmins": [list(m) for m in res.argmins],
        "subsets_scanned": res.subsets_scanned,
    })
    _say(
        f"{res.objective} optimum {res.opt_value} over {res.subsets_scanned} subsets, "
        f"{len(res.argmins)} argmin(s)"
    )
    return 0


def _check(failures: list[str], ok: bool, label: str) -> None:
    if not ok:
        failures.append(label)


def _cmd_verify(args) -> int:
    inst = read_instance(args.instance)
    import json

    try:
        with open(args.result, "r", encoding="utf-8") as fh:
            stored = json.load(fh)
    except OSError as exc:
        raise ParseError(str(exc), args.result)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, args.result, exc.lineno)

    failures: list[str] = []
    depots = stored.get("depots") or []
    _check(failures, bool(depots), "depots present")
    if failures:
        _emit(args, {"ok": False, "failures": failures})
        return 4
    report = objective_report(inst, depots)
    sr = stored.get("report") or {}
    for key, val in (
        ("med", report.med), ("flow", report.flow),
        ("tree_d", report.tree_d), ("tree_c", report.tree_c),
    ):
        stored_val = sr.get(key)
        if stored_val is None and val is None:
            continue
        _check(
            failures,
            stored_val is not None and val is not None and abs(stored_val - val) <= TOL,
            f"report.{key} matches recomputation",
        )
    params = stored.get("params") or {}
    mode = stored.get("mode", "")
    if stored.get("phi") is not None and params.get("rho") is not None:
        obj = Objective(params["rho"], params.get("tree_metric", "d"))
        _check(
            failures,
            abs(phi(inst, obj, depots) - stored["phi"]) <= TOL,
            "phi matches recomputation",
        )
    if mode == "locvrp":
        _check(failures, len(depots) == inst.k, "depot budget respected")
    elif mode == "bicriteria":
        _check(failures, len(depots) <= 2 * inst.k, "depot budget within 2k")
    if stored.get("plan") is not None:
        plan = plan_from_dict(stored["plan"])
        pr = validate_plan(inst, plan)
        for v in pr.violations:
            failures.append(f"plan: {v.message}")
        if inst.Q is not None:
            lb = lower_bound(inst, depots)
            stored_lb = stored.get("lower_bound")
            _check(
                failures,
                stored_lb is not None and abs(stored_lb - lb) <= TOL,
                "lower bound matches recomputation",
            )
            ratio = stored.get("ratio")
            if lb > 0:
                _check(
                    failures,
                    ratio is not None and abs(ratio - plan.total_cost / lb) <= TOL,
                    "ratio matches recomputation",
                )
                _check(failures, plan.total_cost >= lb - TOL, "cost at or above lower bound")
    ok = not failures
    _emit(args, {"ok": ok, "failures": failures})
    _say("verification passed" if ok else f"verification failed: {'; '.join(failures)}")
    return 0 if ok else 4


def _cmd_gap_demo(args) -> int:
    inst = gen_gap(k=args.k, w=args.w, M=args.M)
    obj = Objective(rho=1.0, tree_metric="c")
    local = gap_local_set(args.k)
    res = brute_subset_opt(inst, objective="kmf", rho=1.0, tree_metric="c")
    phi_local = phi(inst, obj, local)
    locally_opt, counter = is_local_opt(inst, obj, local, args.t)
    consistent, witness = consistency_check(inst)
    ratio = phi_local / res.opt_value
    ok = locally_opt and not consistent and abs(ratio - args.w) <= TOL
    _emit(args, {
        "k": args.k,
        "w": args.w,
        "M": args.M,
        "t": args.t,
        "local_set": list(local),
        "phi_local": phi_local,
        "opt_value": res.opt_value,
        "opt_sets": [list(m) for m in res.argmins],
        "ratio": ratio,
        "locally_optimal": locally_opt,
        "consistent": consistent,
        "witness": None if witness is None else {
            "edge_low": list(witness.edge_low),
            "edge_high": list(witness.edge_high),
            "d": [witness.d_low, witness.d_high],
            "c": [witness.c_low, witness.c_high],
        },
        "ok": ok,
    })
    _say(
        f"local optimum at value {phi_local} vs global {res.opt_value}: "
        f"ratio {ratio:g} (target {args.w:g}); "
        f"locally optimal under {args.t}-swaps: {locally_opt}; "
        f"metrics consistent: {consistent}"
    )
    return 0 if ok else 4


def _cmd_import_tsplib(args) -> int:
    inst = import_tsplib_cvrp(getattr(args, "in"))
    if args.out:
        write_instance(args.out, inst)
    else:
        sys.stdout.write(dumps(instance_to_dict(inst)))
    report = validate_instance(inst)
    _say(
        f"imported {inst.meta.get('name', '?')}: n={inst.n} k={inst.k} Q={inst.Q}; "
        + ("instance valid" if report.ok else f"{len(report.violations)} violations")
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="medforest", description=__doc__)
    parser.add_argument("--version", action="version", version=f"medforest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--kind", required=True, choices=("appendix", "gap", "random"))
    p.add_argument("--ell", type=int, default=10, help="scale of the appendix family")
    p.add_argument("--k", type=int, default=None, help="depot budget (gap, random)")
    p.add_argument("--w", type=float, default=100.0, help="gap demand weight")
    p.add_argument("--M", type=float, default=1e6, help="gap far distance")
    p.add_argument("--n", type=int, default=10, help="random instance size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-kind", choices=RANDOM_KINDS, default="euclidean")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="choose depots and routes")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--mode",
        choices=("locvrp", "bicriteria", "kmf", "kmedian", "ktree"),
        default="locvrp",
    )
    p.add_argument("--t", type=int, default=2, help="swap size budget")
    p.add_argument("--delta", type=float, default=1e-7)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=None, help="kmf objective weight")
    p.add_argument("--tree-metric", choices=("d", "c"), default="d")
    p.add_argument("--depot-policy", choices=("nearest", "component"), default="nearest")
    p.add_argument("--threads", type=int, default=None,
                   help="restart parallelism (default: MEDFOREST_THREADS or 1)")
    p.add_argument("--trace", default=None, help="write the best search trace (JSONL)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive optimum over all depot sets")
    p.add_argument("--instance", required=True)
    p.add_argument("--objective", choices=("median", "ktree", "kmf"), default="kmf")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--tree-metric", choices=("d", "c"), default="d")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("verify", help="re-check a stored result against its instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--result", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gap-demo", help="show the unbounded two-metric locality gap")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--w", type=float, default=100.0)
    p.add_argument("--M", type=float, default=1e6)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gap_demo)

    p = sub.add_parser("import-tsplib", help="convert a TSPLIB CVRP file")
    p.add_argument("--in", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_import_tsplib)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _say(f"error: {exc}")
        return 2
    except GuardExceededError as exc:
        _say(f"guard exceeded: {exc}")
        return 3
    except OSError as exc:
        _say(f"i/o error: {exc}")
        return 2
    except MedforestError as exc:
        _say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
