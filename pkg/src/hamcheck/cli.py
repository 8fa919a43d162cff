"""Command line entry point ``hamcheck``.

Every command prints a JSON report

    {"command", "inputs", "verdict", "residual"?, "derived_rhs"?, "timings", ...}

to stdout (or ``--out``).  Exit status: 0 pass, 2 verdict fail, 1 error.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
import time
from typing import Callable, Dict, List, Optional

import numpy as np

from . import bracket as br
from .diffop import skew_defect
from .dsl import DslDocument, DslError, parse
from .jet import equal_mod_div
from .findim import InnerSolveError, RigidBodyState, simulate_rigid_body
from .spectral import EQUATIONS, BlowUpError, simulate

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

DEFAULT_U0 = {"kdv": "cos(x)", "burgers": "sin(x)", "ch": "1 + 0.3*cos(x)"}
_U0_NAMESPACE = {
    "sin": np.sin, "cos": np.cos, "exp": np.exp, "tanh": np.tanh,
    "cosh": np.cosh, "sqrt": np.sqrt, "pi": np.pi,
}


class CliError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors share exit status 1 with every other error
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load(path: str) -> DslDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _pick(table: Dict, name: Optional[str], what: str):
    if not table:
        raise CliError(f"document declares no {what}")
    if name is None:
        return next(iter(table.items()))
    if name not in table:
        raise CliError(f"undeclared {what} {name!r}")
    return name, table[name]


def _structure(doc: DslDocument, op_name: Optional[str]):
    name, P = _pick(doc.operators, op_name, "operator")
    return name, br.BracketStructure(P, doc.state, doc.domain)


def _skew_fail(report: Dict, exc: br.SkewnessError) -> int:
    report["verdict"] = "fail"
    report["residual"] = str(exc.defect)
    report["reason"] = "operator is not skew-adjoint"
    return EXIT_FAIL


def cmd_check_skew(args, report) -> int:
    doc = _load(args.document)
    name, B = _structure(doc, args.op)
    report["inputs"].update(document=args.document, operator=name, P=str(B.operator))
    defect = skew_defect(B.operator)
    report["verdict"] = "pass" if defect.is_zero() else "fail"
    report["residual"] = str(defect)
    return EXIT_PASS if defect.is_zero() else EXIT_FAIL


def cmd_check_jacobi(args, report) -> int:
    doc = _load(args.document)
    name, B = _structure(doc, args.op)
    report["inputs"].update(document=args.document, operator=name, P=str(B.operator), state=B.state)
    try:
        result = br.jacobi_check(B)
    except br.SkewnessError as exc:
        return _skew_fail(report, exc)
    report["verdict"] = result.verdict
    report["residual"] = str(result.residual)
    report["intermediate"] = str(result.intermediate)
    return EXIT_PASS if result.passed else EXIT_FAIL


def _substitutions(doc: DslDocument, extra: List[str]):
    subs = list(doc.substitutions)
    for text in extra or ():
        subs.append(doc.substitution(text))
    return subs


def cmd_derive(args, report) -> int:
    doc = _load(args.document)
    name, B = _structure(doc, args.op)
    if args.grad:
        grad, source = doc.expr(args.grad), "--grad"
    elif doc.gradients:
        source, grad = next(iter(doc.gradients.items()))
    elif doc.functionals:
        source, F = next(iter(doc.functionals.items()))
        grad = B.gradient(F)
    else:
        raise CliError("document declares neither a gradient nor a functional")
    subs = _substitutions(doc, args.subst)
    report["inputs"].update(
        document=args.document, operator=name, P=str(B.operator), state=B.state,
        hamiltonian=source, gradient=str(grad),
        substitutions=[f"{v} -> {e}" for v, e in subs],
    )
    try:
        rhs = br.derive_evolution(B, grad, subs)
    except br.SkewnessError as exc:
        return _skew_fail(report, exc)
    report["verdict"] = "pass"
    report["derived_rhs"] = str(rhs)
    report["equation"] = f"{B.state}_t = {rhs}"
    return EXIT_PASS


def cmd_check_casimir(args, report) -> int:
    doc = _load(args.document)
    name, B = _structure(doc, args.op)
    if args.casimir:
        C, source = doc.functional(args.casimir), args.casimir
    else:
        source, C = _pick(doc.functionals, None, "functional")
    report["inputs"].update(document=args.document, operator=name, P=str(B.operator), casimir=str(C))
    try:
        result = br.casimir_check(B, C)
    except br.SkewnessError as exc:
        return _skew_fail(report, exc)
    report["verdict"] = "pass" if result.is_casimir else "fail"
    report["residual"] = str(result.residual)
    return EXIT_PASS if result.is_casimir else EXIT_FAIL


def cmd_bracket(args, report) -> int:
    doc = _load(args.document)
    name, B = _structure(doc, args.op)
    f_name, F = _pick(doc.functionals, args.F, "functional")
    g_name, G = _pick(doc.functionals, args.G, "functional")
    report["inputs"].update(document=args.document, operator=name, F=str(F), G=str(G))
    try:
        FG = br.bracket_density(B, F, G)
        GF = br.bracket_density(B, G, F)
    except br.SkewnessError as exc:
        return _skew_fail(report, exc)
    antisymmetric = equal_mod_div(FG.density + GF.density, 0)
    report["verdict"] = "pass" if antisymmetric else "fail"
    report["bracket"] = str(FG)
    report["antisymmetric"] = antisymmetric
    return EXIT_PASS if antisymmetric else EXIT_FAIL


def _u0(text: str) -> Callable:
    try:
        code = compile(text, "<u0>", "eval")
    except SyntaxError as exc:
        raise CliError(f"cannot parse initial condition {text!r}: {exc.msg}") from None
    for name in code.co_names:
        if name != "x" and name not in _U0_NAMESPACE:
            raise CliError(f"unknown name {name!r} in initial condition")
    return lambda x: eval(code, {"__builtins__": {}}, dict(_U0_NAMESPACE, x=x))


def _write_text(path: Optional[str], writer):
    if path:
        with open(path, "w", newline="") as fh:
            writer(fh)
    else:
        buf = io.StringIO()
        writer(buf)
        sys.stdout.write(buf.getvalue())


def cmd_simulate(args, report) -> int:
    if args.equation not in EQUATIONS:
        raise CliError(f"--equation must be one of {', '.join(EQUATIONS)}")
    u0_text = args.u0 or DEFAULT_U0[args.equation]
    report["inputs"].update(equation=args.equation, u0=u0_text, N=args.N, dt=args.dt, T=args.T,
                            stride=args.stride, dealias=args.dealias)
    try:
        result = simulate(args.equation, _u0(u0_text), args.N, args.dt, args.T,
                          stride=args.stride, dealias=args.dealias)
    except BlowUpError as exc:
        report["verdict"] = "fail"
        report["reason"] = str(exc)
        report["last_valid_time"] = exc.last_time
        return EXIT_FAIL
    mon = result.monitors
    report["verdict"] = "pass"
    report["monitors"] = {
        name: {"initial": float(col[0]), "final": float(col[-1]),
               "max_abs_drift": mon.absolute_drift(name)}
        for name, col in mon.columns().items() if name != "t"
    }
    if args.monitors:
        result.write_monitors_csv(args.monitors)
    if args.snapshots:
        result.write_snapshots_json(args.snapshots)
    if args.format == "csv":
        report["_csv"] = result.write_monitors_csv
    return EXIT_PASS


def _triple(text: str, what: str):
    try:
        values = [float(s) for s in text.split(",")]
    except ValueError:
        raise CliError(f"{what} must be three comma-separated numbers") from None
    if len(values) != 3:
        raise CliError(f"{what} must be three comma-separated numbers")
    return tuple(values)


def cmd_rigid_body(args, report) -> int:
    inertia = _triple(args.inertia, "--I")
    m0 = _triple(args.m0, "--m0")
    report["inputs"].update(I=list(inertia), m0=list(m0), dt=args.dt, T=args.T)
    try:
        traj = simulate_rigid_body(RigidBodyState(m0, inertia), args.dt, args.T)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    except InnerSolveError as exc:
        report["verdict"] = "fail"
        report["reason"] = str(exc)
        return EXIT_FAIL
    report["verdict"] = "pass"
    report["monitors"] = {
        "H": {"initial": float(traj.H[0]), "final": float(traj.H[-1]), "relative_drift": traj.relative_drift("H")},
        "C": {"initial": float(traj.C[0]), "final": float(traj.C[-1]), "relative_drift": traj.relative_drift("C")},
    }
    if args.monitors:
        traj.to_csv(args.monitors)
    if args.format == "csv":
        report["_csv"] = traj.to_csv
    return EXIT_PASS


COMMANDS = {
    "check-skew": cmd_check_skew,
    "check-jacobi": cmd_check_jacobi,
    "derive": cmd_derive,
    "check-casimir": cmd_check_casimir,
    "bracket": cmd_bracket,
    "simulate": cmd_simulate,
    "rigid-body": cmd_rigid_body,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="hamcheck", description=__doc__.splitlines()[0])
    common = _ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def doc_command(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("document", help="a .ham declaration file")
        p.add_argument("--op", help="operator to use (default: first declared)")
        return p

    doc_command("check-skew", "is the operator skew-adjoint?")
    doc_command("check-jacobi", "does the operator satisfy the Jacobi identity?")
    p = doc_command("derive", "derive the Hamiltonian evolution equation")
    p.add_argument("--grad", help="gradient of the Hamiltonian, overrides the document")
    p.add_argument("--subst", action="append", default=[], help="'<var> -> <expr>', repeatable")
    p = doc_command("check-casimir", "is a functional a Casimir?")
    p.add_argument("--casimir", help="functional, e.g. 'int(u)' (default: first func)")
    p = doc_command("bracket", "bracket of two declared functionals")
    p.add_argument("F", nargs="?")
    p.add_argument("G", nargs="?")

    p = sub.add_parser("simulate", parents=[common], help="pseudo-spectral integration")
    p.add_argument("--equation", required=True, choices=EQUATIONS)
    p.add_argument("--u0", help="initial state as an expression in x (CH: the momentum m)")
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--stride", type=int, default=100, help="monitor every this many steps")
    p.add_argument("--dealias", action="store_true")
    p.add_argument("--monitors", help="also write monitor CSV here")
    p.add_argument("--snapshots", help="write solution snapshots as JSON here")

    p = sub.add_parser("rigid-body", parents=[common], help="implicit midpoint rigid body")
    p.add_argument("--I", dest="inertia", default="1,2,3")
    p.add_argument("--m0", default="1,2,3")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--monitors", help="also write monitor CSV here")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    report = {"command": args.command, "inputs": {}, "verdict": "error", "timings": {}}
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, report)
    except (CliError, DslError) as exc:
        report["error"] = str(exc)
        code = EXIT_ERROR
    except ValueError as exc:
        report["error"] = str(exc)
        code = EXIT_ERROR
    report["timings"]["total_s"] = round(time.perf_counter() - start, 6)

    csv_writer = report.pop("_csv", None)
    if csv_writer is not None and code == EXIT_PASS:
        _write_text(args.out, csv_writer)
        return code
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    _write_text(args.out, lambda fh: fh.write(text))
    if code == EXIT_ERROR:
        print(f"hamcheck: error: {report['error']}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
