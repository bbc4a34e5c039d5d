"""Command-line front end: ``twopoint {integrate,bounds,verify,sharpness,convergence}``.

Exit codes: 0 success, 1 mathematical violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds as bd
from . import verify as vf
from .kernels import Interval, NodeTriple, tampered_kernel
from .quadrature import composite_integrate, expand, reference_integral
from .testlib import NormSpec, get_function

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
REPORT_COLUMNS = ("bound", "n", "p", "nodes", "interval", "value", "remainder",
                  "satisfied", "tightness", "h_estimated")


class UsageError(Exception):
    pass


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.replace("−", "-").split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} values, got {len(vals)}")
    return vals


def _triple(text: str) -> NodeTriple:
    return NodeTriple(*_floats(text, 3))


def _panels(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("panel counts must be positive")
    return vals


def _norm(text: str) -> NormSpec:
    try:
        return NormSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _order(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("order must be >= 1")
    return n


def _add_interval(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, default=0.0, help="left end (default 0)")
    p.add_argument("--b", type=float, default=1.0, help="right end (default 1)")


def _add_format(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="emit JSON")
    g.add_argument("--csv", action="store_true", help="emit CSV")


def _interval(args) -> Interval:
    try:
        return Interval(args.a, args.b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _function(name: str):
    try:
        return get_function(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _checked_nodes(nodes: NodeTriple, iv: Interval) -> NodeTriple:
    try:
        return nodes.check(iv)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2)


def _rows_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


def _emit(args, rows: list[dict], columns, text_lines: list[str]) -> None:
    if args.json:
        print(dump_json(rows if len(rows) != 1 else rows[0]))
    elif args.csv:
        sys.stdout.write(_rows_csv(rows, columns))
    else:
        print("\n".join(text_lines))


# --- commands -------------------------------------------------------------------

def cmd_integrate(args) -> int:
    iv = _interval(args)
    f = _function(args.fn)
    nodes = _checked_nodes(args.nodes, iv)
    if args.n > f.max_order:
        raise UsageError(f"{f.name} has derivatives up to order {f.max_order}")
    res = expand(f, args.n, nodes, iv)
    row = {"fn": f.name, "n": args.n, "nodes": nodes.as_list(), "interval": [iv.a, iv.b],
           **res.to_dict(), "ok": res.ok}
    if args.panels is not None:
        if 2 * args.n > f.max_order:
            raise UsageError(f"composite rule needs derivatives up to order {2 * args.n - 1}")
        pattern = NodeTriple(*[(v - iv.a) / iv.length for v in nodes.as_list()])
        comp = composite_integrate(f, args.n, args.panels, pattern, iv)
        row.update(panels=args.panels, composite=comp, composite_error=abs(comp - res.reference))
    lines = [f"{k} = {v}" for k, v in row.items()]
    _emit(args, [row], list(row), lines)
    return EXIT_OK if res.ok else EXIT_VIOLATION


def cmd_bounds(args) -> int:
    iv = _interval(args)
    f = _function(args.fn)
    nodes = _checked_nodes(args.nodes, iv)
    kinds = args.which.split(",")
    unknown = [k for k in kinds if k not in vf.BOUND_KINDS]
    if unknown:
        raise UsageError(f"unknown bound(s) {unknown}; choose from {', '.join(vf.BOUND_KINDS)}")
    if "gs" in kinds and not vf.is_symmetric(nodes, iv):
        raise UsageError("gs bound needs symmetric nodes h,(a+b)/2,a+b-h")
    if args.n > f.max_order:
        raise UsageError(f"{f.name} has derivatives up to order {f.max_order}")
    if args.t0 is not None and not iv.a <= args.t0 <= iv.b:
        raise UsageError("t0 must lie in [a, b]")
    if not 0 < args.r <= 1:
        raise UsageError("r must lie in (0, 1]")
    if args.H is not None and args.H < 0:
        raise UsageError("H must be nonnegative")
    reports = [
        vf.evaluate_bound(k, f, args.n, args.p, nodes, iv, t0=args.t0, r=args.r, H=args.H, alpha=args.alpha)
        for k in kinds
    ]
    rows = [r.to_dict() for r in reports]
    lines = [
        f"{r.bound_name:14s} p={r.p.label():4s} bound={r.bound_value:.6e} remainder={r.remainder_abs:.6e} "
        f"tightness={r.tightness:.4f} {'ok' if r.satisfied else 'VIOLATED'}"
        + (" (H estimated)" if r.h_estimated else "")
        for r in reports
    ]
    _emit(args, rows, REPORT_COLUMNS, lines)
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_VIOLATION


def cmd_verify(args) -> int:
    suites = vf.SUITES if args.suite == "all" else (args.suite,)
    guard = tampered_kernel() if args.tamper else contextlib.nullcontext()
    results = []
    with guard:
        for name in suites:
            results.extend(vf.run_suite(name, args.seed, args.trials, args.form))
    rows = [{"suite": r.suite, "config": r.label, "residual": r.residual, "tol": r.tol, "ok": r.ok}
            for r in results]
    _emit(args, rows, ("suite", "config", "residual", "tol", "ok"), [r.line() for r in results])
    bad = [r for r in results if not r.ok]
    worst = max((r.residual for r in results), default=0.0)
    print(f"{len(results)} cases, {len(bad)} failed, max residual {worst:.3e} (seed {args.seed})",
          file=sys.stderr)
    for r in bad:
        print(f"FAILED [seed={args.seed} trials={args.trials}] {r.suite}: {r.label}", file=sys.stderr)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_sharpness(args) -> int:
    iv = _interval(args)
    nodes = _checked_nodes(args.nodes, iv)
    p, n = args.p, args.n
    if args.eps <= 0:
        raise UsageError("eps must be positive")
    if args.which == "gs":
        if not vf.is_symmetric(nodes, iv) or nodes.y > iv.mid:
            raise UsageError("gs probe needs symmetric nodes h,(a+b)/2,a+b-h")
        x = nodes.y
        ratio = bd.gs_spike_ratio(n, x, iv, args.eps) if p.p == 1 else bd.gs_sharpness_ratio(n, p, x, iv)
    else:
        ratio = bd.best_spike(n, nodes, iv, args.eps)[1] if p.p == 1 else bd.lp_tightness(n, p, nodes, iv)
    threshold = 0.99 if p.p == 1 else 0.999
    judged = p.p != 1 or args.eps <= 1e-3
    status = "ok"
    code = EXIT_OK
    if args.which == "gs" and ratio > 1 + 1e-6:
        status, code = "EXCEEDS BOUND", EXIT_VIOLATION
    elif judged and ratio < threshold:
        status, code = "below threshold", EXIT_VIOLATION
    elif not judged:
        status = "reported (threshold applies at eps <= 1e-3)"
    row = {"which": args.which, "n": n, "p": p.label(), "nodes": nodes.as_list(),
           "interval": [iv.a, iv.b], "eps": args.eps if p.p == 1 else None, "ratio": ratio,
           "threshold": threshold, "status": status}
    _emit(args, [row], list(row), [f"{args.which} n={n} p={p.label()} ratio={ratio:.6f} {status}"])
    return code


def fit_order(panels, errors) -> float:
    slope = np.polyfit(np.log(panels), np.log(errors), 1)[0]
    return float(-slope)


def cmd_convergence(args) -> int:
    iv = _interval(args)
    f = _function(args.fn)
    pattern = _checked_nodes(args.pattern, Interval(0.0, 1.0))
    n = args.n
    if 2 * n - 1 > f.max_order:
        raise UsageError(f"{f.name} has derivatives up to order {f.max_order}")
    ref = f.exact_integral(iv)
    if ref is None:
        ref = reference_integral(f, iv)
    errors = [abs(composite_integrate(f, n, k, pattern, iv) - ref) for k in args.panels]
    floor = 1e-12 * (1 + abs(ref))
    symmetric = abs(pattern.x - 0.5) < 1e-12 and abs(pattern.y + pattern.z - 1) < 1e-12
    if max(errors) <= floor:
        order, note, code = None, "errors at rounding level; order check skipped", EXIT_OK
    elif len(args.panels) < 2:
        raise UsageError("need at least two panel counts to fit an order")
    else:
        order = fit_order(args.panels, [max(e, 1e-300) for e in errors])
        if symmetric:
            code = EXIT_OK if order >= 2 * n - 0.2 else EXIT_VIOLATION
            note = f"expected order {2 * n}"
        else:
            code, note = EXIT_OK, f"asymmetric pattern; order reported only (expected {2 * n})"
    rows = [{"panels": k, "error": e} for k, e in zip(args.panels, errors)]
    lines = [f"{'panels':>8s}  error"] + [f"{k:8d}  {e:.3e}" for k, e in zip(args.panels, errors)]
    lines.append(f"fitted order: {'n/a' if order is None else f'{order:.3f}'} ({note})")
    if args.json:
        print(dump_json({"fn": f.name, "n": n, "pattern": pattern.as_list(), "table": rows,
                         "order": order, "note": note}))
    elif args.csv:
        sys.stdout.write(_rows_csv(rows, ("panels", "error")))
    else:
        print("\n".join(lines))
    return code


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twopoint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="expand one rule and check its identity residual")
    p.add_argument("--fn", required=True)
    _add_interval(p)
    p.add_argument("--n", type=_order, required=True)
    p.add_argument("--nodes", type=_triple, required=True, help="y,x,z")
    p.add_argument("--panels", type=_order, help="also run the composite rule on this many panels")
    _add_format(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("bounds", help="evaluate error bounds against the true remainder")
    p.add_argument("--fn", required=True)
    _add_interval(p)
    p.add_argument("--n", type=_order, required=True)
    p.add_argument("--nodes", type=_triple, required=True, help="y,x,z")
    p.add_argument("--which", required=True, help="comma-separated: " + ",".join(vf.BOUND_KINDS))
    p.add_argument("--p", type=_norm, default=NormSpec(math.inf), help="1..inf (default inf)")
    p.add_argument("--t0", type=float)
    p.add_argument("--r", type=float, default=1.0, help="Hölder exponent (default 1)")
    p.add_argument("--H", type=float, help="Hölder constant (estimated when omitted)")
    p.add_argument("--alpha", type=float, help="shift of the monomial sequence (default x)")
    _add_format(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="seeded identity-residual sweeps")
    p.add_argument("--suite", choices=vf.SUITES + ("all",), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_order, default=100)
    p.add_argument("--form", choices=("printed", "derived"), default="printed",
                   help="closed coefficients for the symmetric rule (default printed)")
    p.add_argument("--tamper", action="store_true", help="negative control: flip the kernel sign")
    _add_format(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sharpness", help="tightness of extremal functions")
    p.add_argument("--which", choices=("lp", "gs"), required=True)
    p.add_argument("--p", type=_norm, required=True)
    p.add_argument("--n", type=_order, required=True)
    p.add_argument("--nodes", type=_triple, required=True, help="y,x,z")
    _add_interval(p)
    p.add_argument("--eps", type=float, default=1e-3, help="spike width for p = 1")
    _add_format(p)
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("convergence", help="composite-rule error versus panel count")
    p.add_argument("--fn", required=True)
    p.add_argument("--n", type=_order, required=True)
    p.add_argument("--pattern", type=_triple, required=True, help="y,x,z on [0,1]")
    p.add_argument("--panels", type=_panels, default=[8, 16, 32, 64])
    _add_interval(p)
    _add_format(p)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
