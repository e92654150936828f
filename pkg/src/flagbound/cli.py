"""Command-line surface: enumerate, bound, certify, verify, inspect and
lower-bound subcommands over JSON problem files.

Problem files carry: r (2 or 3), forbid / forbid_induced (lists of graph
notations), order (the admissible graph order m), and optionally
target_bound and construction.  Exit codes: 0 success or verified,
2 verification failure, 3 input error, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .certificates import (
    CertificateError,
    certify_problem,
    parse_certificate,
    verify_certificate,
)
from .constructions import (
    ConstructionTemplate,
    construction_density,
    named_construction,
    parse_construction,
)
from .densities import table_lines
from .enumeration import (
    ProblemSpec,
    admissible_graphs,
    default_flag_order,
    enumerate_flags,
    enumerate_types,
)
from .graphs import GraphError, parse_graph, rational
from .sdp import SdpError, assemble, export_sparse_sdp, import_solution, solve_small

EXIT_OK = 0
EXIT_VERIFICATION = 2
EXIT_INPUT = 3
EXIT_CAP = 4


def _decimal(x: Fraction) -> str:
    return f"{x} (~ {float(x):.6f})"


def load_problem_file(path) -> tuple[ProblemSpec, dict]:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise GraphError("problem file must be a JSON object")
    r = int(data.get("r", 3))
    forbid = tuple(parse_graph(g, r) for g in data.get("forbid", []))
    forbid_induced = tuple(parse_graph(g, r) for g in data.get("forbid_induced", []))
    spec = ProblemSpec(r, forbid, forbid_induced, int(data["order"]))
    return spec, data


def _problem_construction(spec: ProblemSpec, data: dict, override: str | None) -> ConstructionTemplate | None:
    text = override or data.get("construction")
    if not text:
        return None
    return parse_construction(text, spec.r)


def cmd_enumerate(args) -> int:
    spec, _ = load_problem_file(args.problem)
    graphs = admissible_graphs(spec, spec.m)
    print(f"{len(graphs)} admissible graphs of order {spec.m}")
    for g in graphs:
        print(f"  {g.notation()}")
    types = enumerate_types(spec)
    print(f"{len(types)} types")
    for t in types:
        flags = enumerate_flags(t, default_flag_order(spec, t), spec)
        print(f"  type {t.notation() or '0:'}: {len(flags)} flags of order {default_flag_order(spec, t)}")
        for f in flags:
            print(f"    {f.notation()}")
    return EXIT_OK


def cmd_bound(args) -> int:
    spec, data = load_problem_file(args.problem)
    problem = assemble(spec)
    if args.export:
        export_sparse_sdp(problem, args.export)
        print(f"exported sparse problem to {args.export}")
        print(f"blocks: {problem.block_sizes} + diagonal slack of size {len(problem.graphs)}")
        return EXIT_OK
    if args.solution:
        solution = import_solution(problem, args.solution)
    else:
        solution = solve_small(problem, tolerance=args.tolerance)
    print(f"bound ~ {solution.bound:.6f}")
    print(f"blocks: {problem.block_sizes}")
    print(f"worst constraint residual: {solution.worst_violation:.3g}")
    if solution.note:
        print(solution.note)
    return EXIT_OK


def cmd_certify(args) -> int:
    spec, data = load_problem_file(args.problem)
    problem = assemble(spec)
    if args.solution == "internal":
        solution = solve_small(problem, tolerance=args.tolerance)
    else:
        solution = import_solution(problem, args.solution)
    construction = _problem_construction(spec, data, args.construction)
    target = args.target or data.get("target_bound")
    cert = certify_problem(
        problem,
        solution,
        construction=construction,
        q=args.denominator,
        target=rational(target) if target else None,
        destination=args.out,
    )
    print(f"certificate written to {args.out}")
    print(f"claimed bound: {_decimal(cert.bound)}")
    return EXIT_OK


_SHOW_CHOICES = ("graphs", "types", "flags", "q-matrices", "densities", "coefficients", "tight")


def _show_certificate(cert, report, what: str) -> None:
    if what == "graphs":
        print(f"{len(cert.admissible)} admissible graphs of order {cert.order}")
        for g in cert.admissible:
            print(f"  {g}")
    elif what == "types":
        for t in cert.types:
            print(f"  {t or '0:'}")
    elif what == "flags":
        for t, group in zip(cert.types, cert.flags):
            print(f"type {t or '0:'}:")
            for f in group:
                print(f"  {f}")
    elif what == "q-matrices":
        from .graphs import format_rational
        from .rational_linalg import mat_mul, transpose

        for idx, (qd, rm) in enumerate(zip(cert.qdash_matrices, cert.r_matrices)):
            q = mat_mul(mat_mul(rm, qd), transpose(rm)) if rm else []
            print(f"type {cert.types[idx] or '0:'}: Q =")
            for row in q:
                print("  [" + ", ".join(str(format_rational(x)) for x in row) + "]")
    elif what == "densities":
        from .densities import build_density_table
        from .enumeration import TypeGraph
        from .certificates import parse_flag_notation

        graphs = [parse_graph(g, cert.r) for g in cert.admissible]
        for t_not, group in zip(cert.types, cert.flags):
            t = TypeGraph(parse_graph(t_not, cert.r))
            flags = [parse_flag_notation(f, cert.r, t) for f in group]
            table = build_density_table(t, flags, graphs)
            for line in table_lines(table, graphs):
                print(line)
    elif what == "coefficients":
        for g, c in zip(cert.admissible, report.coefficients):
            print(f"  {g}: {_decimal(c)}")
    elif what == "tight":
        print("graphs with flag algebra coefficient equal to the bound:")
        for g in report.tight:
            print(f"  {g}")


def cmd_verify(args) -> int:
    try:
        cert = parse_certificate(args.certificate)
        report = verify_certificate(cert)
    except CertificateError as exc:
        print(f"cannot parse certificate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.show:
        _show_certificate(cert, report, args.show)
        if args.show not in ("coefficients", "tight"):
            return EXIT_OK if report.ok else EXIT_VERIFICATION
    if report.ok:
        print(f"VERIFIED: bound {_decimal(report.achieved)}")
        print(f"tight set: {{{', '.join(report.tight)}}}")
        return EXIT_OK
    print(report.message, file=sys.stderr)
    return EXIT_VERIFICATION


def cmd_lower_bound(args) -> int:
    construction = parse_construction(args.construction, args.r)
    if args.iterated and construction.kind != "iterated":
        construction = ConstructionTemplate(
            "iterated", construction.template, construction.weights
        )
    value = construction_density(construction)
    print(f"{construction.kind} of {construction.template.notation()}: {_decimal(value)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagbound",
        description="Exact Turán density bounds for small uniform hypergraphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list admissible graphs, types and flags")
    p.add_argument("problem", help="JSON problem file")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bound", help="compute or import the floating bound")
    p.add_argument("problem")
    p.add_argument("--internal", action="store_true", help="solve with the internal solver")
    p.add_argument("--export", metavar="PATH", help="write the sparse problem and stop")
    p.add_argument("--import", dest="solution", metavar="PATH", help="read a solver solution")
    p.add_argument("--tolerance", type=float, default=1e-7)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("certify", help="round a solution and emit a certificate")
    p.add_argument("problem")
    p.add_argument("solution", help="solution file, or 'internal' to solve in process")
    p.add_argument("--construction", help="extremal construction guiding the rounding")
    p.add_argument("--denominator", type=int, default=10**8, metavar="Q")
    p.add_argument("--target", help="exact bound to round towards, e.g. 1/2")
    p.add_argument("--out", required=True, help="certificate destination")
    p.add_argument("--tolerance", type=float, default=1e-7)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="independently verify a certificate")
    p.add_argument("certificate")
    p.add_argument("--show", choices=_SHOW_CHOICES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("inspect", help="alias of verify --show")
    p.add_argument("certificate")
    p.add_argument("--show", choices=_SHOW_CHOICES, default="coefficients")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lower-bound", help="exact density of a construction")
    p.add_argument("--construction", required=True, help="library name or 'blowup <notation> weights w1,...'")
    p.add_argument("--iterated", action="store_true")
    p.add_argument("--r", type=int, default=3, choices=(2, 3), help="uniformity for custom templates")
    p.set_defaults(func=cmd_lower_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, CertificateError, json.JSONDecodeError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SdpError as exc:
        message = str(exc)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_CAP if "cap" in message else EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
