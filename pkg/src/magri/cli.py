"""Command line interface.

Exit codes: 0 success, 2 a verification failed, 3 no solution exists in
the searched space, 4 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import diffalg as da
from . import diffop as dop
from . import expr
from . import lenard
from . import pva
from . import render
from . import varcalc as vc
from .errors import (
    EmptyAnsatz,
    ExponentError,
    ExprSyntaxError,
    MagriError,
    NoSolution,
    NotClosed,
    NotSkewAdjoint,
)

OK, FAIL, NOSOL, BADINPUT = 0, 2, 3, 4


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        print(text)


def _add_structure_args(p, count=1):
    if count == 1:
        p.add_argument("--builtin", choices=("h0", "h1"), help="built-in structure")
        p.add_argument("--op", metavar="FILE", help="operator JSON file")
        p.add_argument("--op-expr", metavar="TEXT", help="operator in text form")
    else:
        p.add_argument(
            "--builtin",
            action="store_true",
            help="use the built-in pair of structures",
        )
        for suffix in ("", "2"):
            p.add_argument(f"--op{suffix}", metavar="FILE")
            p.add_argument(f"--op{suffix}-expr", metavar="TEXT")


def _load_operator(file_arg, expr_arg, builtin_arg=None):
    if builtin_arg:
        return lenard.structure(0 if builtin_arg == "h0" else 1)
    if file_arg:
        with open(file_arg) as fh:
            return render.operator_from_json(json.load(fh))
    if expr_arg:
        return expr.parse_operator(expr_arg)
    raise ExprSyntaxError("no operator given (use --builtin, --op, or --op-expr)")


def _one_structure(args):
    return _load_operator(args.op, args.op_expr, args.builtin)


def _two_structures(args):
    if args.builtin:
        return dop.builtin_pair()
    h = _load_operator(args.op, args.op_expr)
    k = _load_operator(args.op2, args.op2_expr)
    return h, k


# -- commands ---------------------------------------------------------------


def cmd_verify_poisson(args):
    h = _one_structure(args)
    try:
        ok = pva.is_poisson(h)
    except NotSkewAdjoint:
        print("NOT_SKEW")
        return FAIL
    print("POISSON" if ok else "NOT_POISSON")
    return OK if ok else FAIL


def cmd_verify_compatible(args):
    h, k = _two_structures(args)
    try:
        ok = pva.is_compatible(h, k)
    except NotSkewAdjoint:
        print("NOT_SKEW")
        return FAIL
    print("COMPATIBLE" if ok else "NOT_COMPATIBLE")
    return OK if ok else FAIL


def cmd_casimir_check(args):
    results = {}
    ok = True
    for eps in (0, 1):
        for alpha in (0, 1):
            label = f"eps={eps},alpha={alpha}"
            try:
                s = lenard.seed(eps, alpha)
            except MagriError as exc:
                results[label] = f"FAIL ({exc})"
                ok = False
                continue
            results[label] = "OK"
            del s
    if args.json:
        _emit(args, {"ok": ok, "seeds": results})
    else:
        for label, verdict in results.items():
            print(f"{label}: {verdict}")
        print("CASIMIR_CHECK " + ("PASSED" if ok else "FAILED"))
    return OK if ok else FAIL


def cmd_hierarchy(args):
    run = lenard.run_hierarchy(
        args.eps,
        args.alpha,
        args.steps,
        method=args.method,
        with_densities=not args.no_densities,
        widen_cap=args.widen_cap,
    )
    if args.latex:
        lines = []
        for n, grad in enumerate(run.gradients):
            lines.append(rf"\xi_{{{n}}} = {render.latex_vector(grad)}")
        for n, h in enumerate(run.densities):
            if h is not None:
                lines.append(rf"h_{{{n}}} = {render.latex(h)}")
        for n, p in enumerate(run.flows):
            lines.append(rf"P_{{{n}}} = {render.latex_vector(p)}")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, render.run_to_json(run))
    bad = [k for k, v in run.checks.items() if v is not True]
    if bad:
        print("failed checks: " + ", ".join(sorted(bad)), file=sys.stderr)
        return FAIL
    return OK


def cmd_bracket(args):
    h = _one_structure(args)
    f = da.LocalFunctional(expr.parse(args.f))
    g = da.LocalFunctional(expr.parse(args.g))
    b = pva.poisson_bracket(f, g, h)
    zero = b.is_zero()
    if args.latex:
        _emit(args, "0" if zero else render.latex(b))
    elif args.json:
        _emit(args, {"zero": zero, "representative": render.function_to_json(b.rep)})
    else:
        print("0" if zero else da.to_text(b.rep))
    return OK


def cmd_flow(args):
    h = _one_structure(args)
    f = da.LocalFunctional(expr.parse(args.density))
    p = pva.hamiltonian_flow(h, f)
    if args.latex:
        _emit(args, render.latex_vector(p))
    elif args.json:
        _emit(args, render.vector_to_json(p))
    else:
        for i, comp in enumerate(p):
            print(f"[{i + 1}] {da.to_text(comp)}")
    return OK


def cmd_reduce(args):
    f = expr.parse(args.expr)
    g = da.antiderivative(f)
    payload = {
        "in_derivative_image": g is not None,
        "antiderivative": None if g is None else render.function_to_json(g),
        "euler_u": render.function_to_json(da.euler_derivative(f, da.U)),
        "euler_v": render.function_to_json(da.euler_derivative(f, da.V)),
        "constant_term": render._frac_str(f.constant_term()),
    }
    if args.json:
        _emit(args, payload)
    elif g is not None:
        print(f"exact: {da.to_text(g)}")
    else:
        print("not exact")
        print(f"euler_u: {da.to_text(da.euler_derivative(f, da.U))}")
        print(f"euler_v: {da.to_text(da.euler_derivative(f, da.V))}")
    return OK


def cmd_varder(args):
    f = expr.parse(args.expr)
    grad = vc.variational_derivative(f)
    if args.latex:
        _emit(args, render.latex_vector(grad))
    elif args.json:
        _emit(args, render.vector_to_json(grad))
    else:
        for i, comp in enumerate(grad):
            print(f"[{i + 1}] {da.to_text(comp)}")
    return OK


def cmd_frechet(args):
    vec = expr.parse_vector(args.vec)
    m = vc.frechet(vec)
    if args.latex:
        _emit(args, render.latex_operator(m))
    elif args.json:
        _emit(args, render.operator_to_json(m))
    else:
        print(render.op_text(m))
    return OK


def cmd_fmt(args):
    if args.operator:
        val = expr.parse_operator(args.expr)
        if args.latex:
            _emit(args, render.latex_operator(val))
        elif args.json:
            _emit(args, render.operator_to_json(val))
        else:
            print(render.op_text(val))
    else:
        val = expr.parse(args.expr)
        if args.latex:
            _emit(args, render.latex(val))
        elif args.json:
            _emit(args, render.function_to_json(val))
        else:
            print(da.to_text(val))
    return OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="magri",
        description="Exact calculus for Hamiltonian operators on two-field "
        "differential polynomials, with Lenard-Magri hierarchy generation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify-poisson", help="check the Jacobi identity")
    _add_structure_args(sp)
    sp.set_defaults(fn=cmd_verify_poisson)

    sp = sub.add_parser("verify-compatible", help="check a pair forms a pencil")
    _add_structure_args(sp, count=2)
    sp.set_defaults(fn=cmd_verify_compatible)

    sp = sub.add_parser("casimir-check", help="verify the built-in seed Casimirs")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_casimir_check)

    sp = sub.add_parser("hierarchy", help="run a Lenard-Magri chain")
    sp.add_argument("--eps", type=int, choices=(0, 1), required=True)
    sp.add_argument("--alpha", type=int, choices=(0, 1), required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--method", choices=("recursion", "ansatz"), default="recursion")
    sp.add_argument("--no-densities", action="store_true")
    sp.add_argument(
        "--widen-cap",
        type=int,
        default=None,
        help="ansatz widening rounds (default from LENARD_WIDEN_CAP, else 2)",
    )
    sp.add_argument("--latex", action="store_true")
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(fn=cmd_hierarchy)

    sp = sub.add_parser("bracket", help="Poisson bracket of two functionals")
    sp.add_argument("--f", required=True, metavar="EXPR")
    sp.add_argument("--g", required=True, metavar="EXPR")
    _add_structure_args(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(fn=cmd_bracket)

    sp = sub.add_parser("flow", help="Hamiltonian flow of a density")
    sp.add_argument("--density", required=True, metavar="EXPR")
    _add_structure_args(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(fn=cmd_flow)

    sp = sub.add_parser("reduce", help="antiderivative / image-of-d test")
    sp.add_argument("expr", metavar="EXPR")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_reduce)

    sp = sub.add_parser("varder", help="variational derivative of a density")
    sp.add_argument("expr", metavar="EXPR")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(fn=cmd_varder)

    sp = sub.add_parser("frechet", help="Frechet derivative of a vector")
    sp.add_argument("--vec", required=True, metavar="'EXPR; EXPR'")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(fn=cmd_frechet)

    sp = sub.add_parser("fmt", help="parse and reprint an expression")
    sp.add_argument("expr", metavar="EXPR")
    sp.add_argument("--operator", action="store_true", help="parse as an operator")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--latex", action="store_true")
    sp.set_defaults(fn=cmd_fmt)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ExprSyntaxError as exc:
        kind = "EXPONENT_ERROR" if isinstance(exc, ExponentError) else "SYNTAX_ERROR"
        print(f"{kind} at {exc.line}:{exc.col}: {exc.message}", file=sys.stderr)
        return BADINPUT
    except (NoSolution, EmptyAnsatz) as exc:
        print(f"NO_SOLUTION: {exc}", file=sys.stderr)
        return NOSOL
    except NotClosed as exc:
        print(f"NOT_CLOSED: {exc}", file=sys.stderr)
        return FAIL
    except (json.JSONDecodeError, OSError, MagriError, ValueError) as exc:
        print(f"INPUT_ERROR: {exc}", file=sys.stderr)
        return BADINPUT


if __name__ == "__main__":
    sys.exit(main())
