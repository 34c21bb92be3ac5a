"""Command-line front end.

Exit codes: 0 found/true, 4 none/false, 1 usage or malformed input,
2 domain error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import itertools
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import io as hio
from .bounds import (
    constant_phi1,
    dumps as expr_dumps,
    evaluate,
    ls_bound,
    mil_bound,
    no_phi1,
    to_text,
    udhl_bound,
)
from .density_search import (
    DenseSet,
    LevelSelection,
    SearchStats,
    check_pst_bound,
    default_budget,
    find_ls_witness,
    find_subtree_in_set,
    glue_sections,
    ls_exact,
    section_reduce,
    signature,
    udhl_exact,
    weight,
)
from .errors import BudgetError, HLTreesError
from .increment import build_schedule, check_properties, gammas
from .strong_subtrees import count_strong, enumerate_strong, validate_vector
from .tree_core import HomogeneousTree, VectorTree, as_node

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_NONE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _b_list(text: str) -> tuple:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty branching list")
    return out


def _rat(text: str) -> Fraction:
    return hio.parse_rational(text)


def _budget(args) -> int:
    return args.budget if args.budget is not None else default_budget()


def _emit(report: dict, args) -> None:
    if args.timing:
        report["wall_time"] = round(time.perf_counter() - args._t0, 6)
    sys.stdout.write(hio.report_text(report))


def _echo(args, **params) -> dict:
    """Command echo: the subcommand plus the parameters that determine the result."""
    out = {"command": args.command}
    for k, v in params.items():
        if isinstance(v, Fraction):
            v = hio.frac_text(v)
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


# --- enum ------------------------------------------------------------------------


def cmd_enum(args) -> int:
    vt = VectorTree(args.b, args.h)
    if args.count_only:
        print(count_strong(vt, args.k))
        return EXIT_OK
    for i, s in enumerate(enumerate_strong(vt, args.k)):
        if args.limit is not None and i >= args.limit:
            break
        print(" || ".join(str(c) for c in s.components))
    return EXIT_OK


# --- search ----------------------------------------------------------------------


def cmd_search(args) -> int:
    inst = hio.load(args.instance)
    stats = SearchStats()
    budget = _budget(args)
    report = _echo(args, instance=Path(args.instance).name, k=args.k, kind=inst.kind)
    if isinstance(inst.payload, DenseSet):
        cert = find_subtree_in_set(inst.payload, args.k, jobs=args.jobs, stats=stats)
        payload = hio.certificate_payload(cert) if cert is not None else None
    elif isinstance(inst.payload, LevelSelection):
        w = find_ls_witness(inst.payload, args.k, budget=budget, stats=stats)
        cert = w
        payload = hio.witness_payload(w) if w is not None else None
    else:
        raise UsageError("search needs a dense-set or level-selection payload")
    report.update(
        verdict="FOUND" if cert is not None else "NONE",
        certificate=payload,
        counters=stats.as_dict(),
        budget={"cap": budget},
    )
    _emit(report, args)
    return EXIT_OK if cert is not None else EXIT_NONE


# --- numbers ---------------------------------------------------------------------


def cmd_numbers(args) -> int:
    budget = _budget(args)
    eps = _rat(args.eps)
    if args.udhl:
        res = udhl_exact(args.b, args.k, eps, args.window, jobs=args.jobs, budget=budget)
    else:
        res = ls_exact(args.b, args.k, eps, args.window, budget=budget)
    report = _echo(args, kind="udhl" if args.udhl else "ls", b=args.b, k=args.k, eps=eps, window=args.window)
    ce = res.counterexample
    report.update(
        value=res.value,
        window=res.window,
        per_size=[{"N": n, "holds": ok} for n, ok in res.per_size],
        counters={"units": res.units},
        budget={"cap": budget},
        note=f"uniformity over level sets is certified only inside levels 0..{res.window - 1}",
    )
    if ce is not None:
        report["counterexample"] = {
            "size": len(ce.levels),
            "levels": list(ce.levels),
            "instance": hio.instance_dict(ce.counterexample, eps),
        }
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            name = f"counterexample-N{len(ce.levels)}.json"
            hio.dump(ce.counterexample, out / name, eps)
            report["counterexample"]["file"] = name
    else:
        report["counterexample"] = None
    _emit(report, args)
    return EXIT_OK if res.value is not None else EXIT_NONE


# --- bound -----------------------------------------------------------------------


def _phi1(args):
    if args.phi1 == "stub":
        return constant_phi1(args.phi1_const)
    return no_phi1()


def cmd_bound(args) -> int:
    if args.mil:
        if args.m is None or args.r is None:
            raise UsageError("--mil needs --m and --r")
        expr = mil_bound(args.b, args.m, args.k, args.r, form=args.form)
    else:
        if args.eps is None:
            raise UsageError("--ls and --udhl need --eps")
        eps = _rat(args.eps)
        expr = ls_bound(args.b, args.k, eps) if args.ls else udhl_bound(args.b, args.k, eps)
    if args.mil or (args.k > 1 and (args.ls or len(args.b) > 1)):
        print("note: M1(m) is Mil over the full vector (b_1, ..., b_d); a subscript printed as b_b is read as b_d", file=sys.stderr)
    if args.mode == "symbolic":
        print(expr_dumps(expr) if args.json else to_text(expr))
        return EXIT_OK
    res = evaluate(expr, digit_cap=args.digit_cap, phi1=_phi1(args))
    print(str(res))
    return EXIT_BUDGET if res.exceeded else EXIT_OK


# --- seq -------------------------------------------------------------------------


def _k0_source(args, b_vec, b_last, eps):
    if args.K0 is not None:
        return lambda b, k, e: args.K0
    if args.k0_source == "exact":

        def exact(b, k, e):
            res = udhl_exact(b, k, e, args.window, budget=_budget(args))
            if res.value is None:
                raise BudgetError(f"no exact value inside window {args.window}")
            return res.value

        return exact

    def bound(b, k, e):
        res = evaluate(udhl_bound(b, k, e), digit_cap=args.digit_cap, phi1=_phi1(args))
        if res.exceeded:
            raise BudgetError(f"iteration count bound {res}")
        return res.value

    return bound


def cmd_seq(args) -> int:
    if args.gamma:
        t = gammas(_rat(args.alpha), _rat(args.beta), _rat(args.rho), args.bits)
        report = _echo(args, kind="gamma", alpha=t.alpha, beta=t.beta, rho=t.rho, bits=args.bits)
        report.update(
            gamma0_squared=hio.frac_text(t.square0),
            gamma0=_interval(t.gamma0),
            gamma1=_interval(t.gamma1),
            gamma2=_interval(t.gamma2),
            identity="PASS" if t.identity_holds() and t.identity_numeric() else "FAIL",
        )
        _emit(report, args)
        return EXIT_OK if report["identity"] == "PASS" else EXIT_NONE
    if args.b is None or args.b_last is None or args.eps is None:
        raise UsageError("--schedule and --props need --b, --b-last and --eps")
    eps = _rat(args.eps)
    sched = build_schedule(args.b, args.b_last, args.k, eps, _k0_source(args, args.b, args.b_last, eps))
    report = _echo(args, kind="props" if args.props else "schedule", b=args.b, b_last=args.b_last, k=args.k, eps=eps)
    report.update(K0=sched.K0, r={"base": hio.frac_text(sched.r.base), "exponent": sched.r.exponent}, Q0=sched.Q0)
    report["theta0"] = hio.frac_text(sched.theta0)
    if args.schedule:
        if sched.symbolic:
            report["deltas"] = None
        else:
            report["deltas"] = [_interval(d) for d in sched.deltas(args.bits)]
            report["eps_seq"] = [_interval(e) for e in sched.eps_seq(args.bits)]
        _emit(report, args)
        return EXIT_OK
    verdicts = check_properties(sched)
    report["properties"] = {v.name: {"status": v.status, "detail": v.detail} for v in verdicts}
    _emit(report, args)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_NONE


def _interval(iv) -> dict:
    if iv.is_exact:
        return {"exact": hio.frac_text(iv.lo)}
    return {"lo": hio.frac_text(iv.lo), "hi": hio.frac_text(iv.hi), "approx": f"{float(iv.lo):.17g}"}


# --- signature ---------------------------------------------------------------------


def _nodes_arg(tokens, tree: HomogeneousTree) -> list:
    out = []
    for tok in tokens:
        t = as_node("" if tok in ("root", "-") else tok, tree.branching)
        tree.check_node(t)
        out.append(t)
    return sorted(set(out))


def cmd_signature(args) -> int:
    if args.instance:
        inst = hio.load(args.instance)
        if not isinstance(inst.payload, DenseSet) or inst.ambient.dim != 1:
            raise UsageError("signature needs a one-dimensional dense-set instance")
        tree = inst.ambient.trees[0]
        sets = [sorted(p[0] for p in inst.payload.points())]
    else:
        if args.b is None or args.h is None:
            raise UsageError("signature needs --b and --h, or an instance file")
        tree = HomogeneousTree(args.b[0], args.h)
        if args.random:
            rng = random.Random(args.seed)
            nodes = list(tree.nodes())
            sets = [[t for t in nodes if rng.random() < 0.5] for _ in range(args.random)]
        elif args.all:
            nodes = list(tree.nodes())
            sets = [[t for t, bit in zip(nodes, bits) if bit] for bits in itertools.product((0, 1), repeat=len(nodes))]
        else:
            sets = [_nodes_arg(args.nodes or [], tree)]
    results = []
    holds_all = True
    for D in sets:
        chk = check_pst_bound(tree, D)
        holds_all &= chk.holds
        results.append(chk)
    report = _echo(args, b=tree.branching, h=tree.height, seed=args.seed if args.random else None)
    if len(sets) == 1:
        D = sets[0]
        chk = results[0]
        report.update(
            nodes=["".join(map(str, t)) for t in D],
            signature=sorted(list(x) for x in signature(tree, D)),
            weight=hio.frac_text(weight(tree, D)),
            bound={"lhs": chk.signature_size, "rhs": f"({tree.branching}/{tree.branching - 1})^({hio.frac_text(chk.weight)})"},
            holds=chk.holds,
            equality=chk.equality,
        )
    else:
        report.update(
            checked=len(sets),
            holds=holds_all,
            equality_cases=sum(1 for c in results if c.equality),
        )
    _emit(report, args)
    return EXIT_OK if holds_all else EXIT_NONE


# --- reduce ----------------------------------------------------------------------


def cmd_reduce(args) -> int:
    inst = hio.load(args.instance)
    if not isinstance(inst.payload, DenseSet) or inst.ambient.dim < 2:
        raise UsageError("reduce needs a dense-set instance with at least two coordinates")
    eps = _rat(args.eps) if args.eps else inst.eps
    if eps is None:
        raise UsageError("no density given (use --eps or store eps in the instance)")
    report = _echo(args, instance=Path(args.instance).name, eps=eps, k=args.k)
    if args.k is None:
        C, sel = section_reduce(inst.payload, eps)
        report.update(reduced=hio.instance_dict(C), selection=hio.instance_dict(sel))
        _emit(report, args)
        return EXIT_OK
    g = glue_sections(inst.payload, eps, args.k)
    report.update(
        reduced=hio.instance_dict(g.reduced),
        host=hio.certificate_payload(g.host) if g.host else None,
        witness=hio.witness_payload(g.witness) if g.witness else None,
        glued=hio.certificate_payload(g.glued) if g.glued else None,
        verdict="FOUND" if g.glued else "NONE",
    )
    if g.glued is not None:
        ok, clause = validate_vector(inst.ambient, g.glued)
        report["glued_valid"] = ok
    _emit(report, args)
    return EXIT_OK if g.glued else EXIT_NONE


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="candidate cap (default: $HLTREES_BUDGET or 10^8)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for partitioned searches")
    common.add_argument("--timing", action="store_true", help="add wall time to reports")

    p = _Parser(prog="hltrees", description="Finite density Halpern-Lauchli computations on homogeneous trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enum", parents=[common], help="enumerate strong subtrees")
    e.add_argument("--b", type=_b_list, required=True)
    e.add_argument("--h", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--count-only", action="store_true")
    e.add_argument("--limit", type=int)
    e.set_defaults(func=cmd_enum)

    s = sub.add_parser("search", parents=[common], help="search an instance file")
    s.add_argument("instance")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_search)

    n = sub.add_parser("numbers", parents=[common], help="exact desk-scale UDHL / LS numbers")
    g = n.add_mutually_exclusive_group(required=True)
    g.add_argument("--udhl", action="store_true")
    g.add_argument("--ls", action="store_true")
    n.add_argument("--b", type=_b_list, required=True)
    n.add_argument("--k", type=int, required=True)
    n.add_argument("--eps", required=True)
    n.add_argument("--window", type=int, default=4)
    n.add_argument("--out-dir", help="write the counterexample for N-1 here")
    n.set_defaults(func=cmd_numbers)

    b = sub.add_parser("bound", parents=[common], help="upper-bound recursions")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--mil", action="store_true")
    g.add_argument("--ls", action="store_true")
    g.add_argument("--udhl", action="store_true")
    b.add_argument("--b", type=_b_list, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--m", type=int)
    b.add_argument("--r", type=int)
    b.add_argument("--eps")
    b.add_argument("--form", choices=("g", "phi"), default="g", help="Milliken construction")
    b.add_argument("--mode", choices=("symbolic", "numeric"), default="symbolic")
    b.add_argument("--digit-cap", type=int, default=10**6)
    b.add_argument("--phi1", choices=("stub", "none"), default="none")
    b.add_argument("--phi1-const", type=int, default=2)
    b.add_argument("--json", action="store_true", help="print the expression tree as JSON")
    b.set_defaults(func=cmd_bound)

    q = sub.add_parser("seq", parents=[common], help="increment sequences and their properties")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", action="store_true")
    g.add_argument("--schedule", action="store_true")
    g.add_argument("--props", action="store_true")
    q.add_argument("--alpha", default="1")
    q.add_argument("--beta", default="1")
    q.add_argument("--rho", default="1")
    q.add_argument("--b", type=_b_list)
    q.add_argument("--b-last", type=int)
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--eps")
    q.add_argument("--K0", type=int, help="use this iteration count instead of computing it")
    q.add_argument("--k0-source", choices=("exact", "bound"), default="exact")
    q.add_argument("--window", type=int, default=5)
    q.add_argument("--bits", type=int, default=128)
    q.add_argument("--digit-cap", type=int, default=10**6)
    q.add_argument("--phi1", choices=("stub", "none"), default="none")
    q.add_argument("--phi1-const", type=int, default=2)
    q.set_defaults(func=cmd_seq)

    g = sub.add_parser("signature", parents=[common], help="signatures, weights and the counting bound")
    g.add_argument("instance", nargs="?")
    g.add_argument("--b", type=_b_list)
    g.add_argument("--h", type=int)
    g.add_argument("--nodes", nargs="*", help="nodes as digit strings; use 'root' for the root")
    g.add_argument("--all", action="store_true", help="sweep every subset of the tree")
    g.add_argument("--random", type=int, default=0, help="sweep this many random subsets")
    g.set_defaults(func=cmd_signature)

    r = sub.add_parser("reduce", parents=[common], help="section-map reduction of a product dense set")
    r.add_argument("instance")
    r.add_argument("--eps")
    r.add_argument("--k", type=int, help="also look for a witness of this height and glue it")
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    args._t0 = time.perf_counter()
    if args.budget is None and os.environ.get("HLTREES_BUDGET"):
        args.budget = default_budget()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hltrees: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HLTreesError as exc:
        print(f"hltrees: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"hltrees: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
