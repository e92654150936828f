"""Rational proof certificates: rounding floating solutions to exact
matrices, emitting the JSON proof object, and verifying it independently.

A certificate carries the problem description, the claimed bound, the
admissible graphs, the types with their flags, and per type two rational
matrices R and Q' (field names ``r_matrices`` and ``qdash_matrices``)
with Q' diagonal and nonnegative, so Q = R Q' R^T is positive
semidefinite beyond doubt.  Verification recomputes everything from the
certificate's own lists in exact arithmetic and never trusts a supplied
density value (none are stored).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .constructions import ConstructionTemplate, limit_flag_density_vectors
from .densities import edge_density, flag_pair_density_table
from .enumeration import Flag, ProblemSpec, TypeGraph, admissible_graphs
from .graphs import (
    GraphError,
    canonical_key,
    format_rational,
    parse_graph,
    rational,
)
from .rational_linalg import IndefiniteError, ldl_congruence, nullspace
from .sdp import SdpProblem, SdpSolution

DEFAULT_DENOMINATOR = 10**8


class CertificateError(ValueError):
    """Unusable certificate or failed rounding."""


# ---------------------------------------------------------------------------
# rounding


def _round_fraction(x: float, q: int) -> Fraction:
    return Fraction(x).limit_denominator(q)


def round_simple(solution: SdpSolution, q: int = DEFAULT_DENOMINATOR) -> list:
    """Round each floating matrix to an exactly PSD rational matrix.

    The matrix is factored as L L^T through its eigendecomposition (tiny
    negative eigenvalues are clipped), L is rounded entrywise to
    denominators at most q, and the product is reassembled exactly.
    """
    out = []
    for mat in solution.matrices:
        sym = (mat + mat.T) / 2
        eigval, eigvec = np.linalg.eigh(sym)
        scale = max(1.0, float(abs(eigval).max()) if len(eigval) else 1.0)
        if len(eigval) and eigval.min() < -1e-8 * scale:
            raise CertificateError(
                f"matrix is indefinite beyond tolerance (min eigenvalue {eigval.min():g})"
            )
        factor = eigvec @ np.diag(np.sqrt(np.clip(eigval, 0.0, None)))
        k = factor.shape[0]
        l_rat = [[_round_fraction(float(factor[i, j]), q) for j in range(k)] for i in range(k)]
        out.append(
            tuple(
                tuple(sum(l_rat[a][c] * l_rat[b][c] for c in range(k)) for b in range(k))
                for a in range(k)
            )
        )
    return out


def factor_psd(q_matrix) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact factorisation Q = R diag(D) R^T of a PSD rational matrix,
    with zero-weight columns dropped."""
    k = len(q_matrix)
    b, d = ldl_congruence([list(row) for row in q_matrix])
    keep = [j for j in range(k) if d[j] != 0]
    if any(d[j] < 0 for j in keep):
        raise IndefiniteError("negative diagonal in PSD factorisation")
    r = [[b[i][j] for j in keep] for i in range(k)]
    return r, [d[j] for j in keep]


@dataclass
class RoundedSolution:
    """Exact per-type factors R, D (Q_i = R_i diag(D_i) R_i^T), with the
    coefficients and achieved bound they certify."""

    factors: list  # list of (R rows, D diagonal)
    coefficients: list[Fraction]
    achieved: Fraction


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def _frobenius_sum(q_rows, table) -> Fraction:
    """<Q, T> over common denominators; integer arithmetic inside."""
    k = len(q_rows)
    dq = _lcm([q_rows[a][b].denominator for a in range(k) for b in range(k)] or [1])
    dt = _lcm([table[a][b].denominator for a in range(k) for b in range(k)] or [1])
    total = 0
    for a in range(k):
        qa = q_rows[a]
        ta = table[a]
        for b in range(k):
            t = ta[b]
            if t:
                total += int(qa[b] * dq) * int(t * dt)
    return Fraction(total, dq * dt)


def _q_from_factor(r, d):
    k = len(r)
    z = len(d)
    return [
        [sum(r[a][j] * d[j] * r[b][j] for j in range(z)) for b in range(k)]
        for a in range(k)
    ]


def _exact_coefficients(problem: SdpProblem, factors) -> list[Fraction]:
    qs = [_q_from_factor(r, d) for r, d in factors]
    out = []
    for h in range(len(problem.graphs)):
        total = problem.densities[h]
        for q, table in zip(qs, problem.tables):
            if q:
                total += _frobenius_sum(q, table.tables[h])
        out.append(total)
    return out


def _float_coefficients(problem: SdpProblem, factors) -> np.ndarray:
    lhs = np.array([float(x) for x in problem.densities])
    for table, (r, d) in zip(problem.float_tables(), factors):
        rf = np.array([[float(x) for x in row] for row in r], dtype=float)
        if rf.size == 0:
            continue
        df = np.array([float(x) for x in d])
        q = rf @ np.diag(df) @ rf.T
        lhs = lhs + np.einsum("hpq,pq->h", table, q)
    return lhs


def rounded_from_matrices(problem: SdpProblem, q_matrices) -> RoundedSolution:
    factors = [factor_psd(q) for q in q_matrices]
    coeffs = _exact_coefficients(problem, factors)
    return RoundedSolution(factors, coeffs, max(coeffs))


_LADDER_GROWTH = 4


def _denominator_ladder(q: int):
    d = 1
    while d < q:
        yield d
        d *= _LADDER_GROWTH
    yield q


def round_with_construction(
    solution: SdpSolution,
    construction: ConstructionTemplate,
    problem: SdpProblem,
    q: int = DEFAULT_DENOMINATOR,
    target: Fraction | None = None,
    residual_tol: float = 1e-3,
) -> RoundedSolution:
    """Round by factoring out the zero eigenspace predicted by an extremal
    construction.

    For each type, the limit flag-density vectors of the construction span
    the expected kernel of the optimal matrix.  The floating matrix is
    expressed in a rational basis of the orthogonal complement, rounded
    there, and diagonalised exactly by congruence; the result R Q' R^T is
    PSD by construction and annihilates the kernel exactly.

    With a target bound, rounding denominators are grown from 1 upward and
    the first denominator whose exact coefficients stay within the target
    wins, which snaps near-tight solutions to the exact optimum.
    """
    if target is not None:
        target = rational(target)
    complements = []
    for t, flags, mat in zip(problem.types, problem.flags, solution.matrices):
        vectors = limit_flag_density_vectors(t, flags, construction)
        sym = (mat + mat.T) / 2
        for v in vectors:
            vf = np.array([float(x) for x in v])
            norm = np.linalg.norm(vf)
            if norm == 0:
                continue
            residual = float(np.linalg.norm(sym @ vf) / norm)
            if residual > residual_tol:
                raise CertificateError(
                    f"construction does not match the solution: kernel residual "
                    f"{residual:.3g} exceeds {residual_tol:g} for type {t}"
                )
        basis = nullspace([list(v) for v in vectors]) if vectors else None
        if basis is None:
            k = len(flags)
            basis = [
                tuple(Fraction(1 if i == j else 0) for i in range(k)) for j in range(k)
            ]
        complements.append(basis)

    # float coordinates of each Q in its complement basis
    coords = []
    for (t, flags, mat), basis in zip(
        zip(problem.types, problem.flags, solution.matrices), complements
    ):
        if not basis:
            coords.append(np.zeros((0, 0)))
            continue
        r0 = np.array([[float(x) for x in vec] for vec in zip(*basis)])
        gram_inv = np.linalg.inv(r0.T @ r0)
        sym = (mat + mat.T) / 2
        coords.append(gram_inv @ r0.T @ sym @ r0 @ gram_inv)

    def factor_at(denom):
        factors = []
        for basis, coord in zip(complements, coords):
            z = len(basis)
            rounded = [
                [_round_fraction(float(coord[i, j]), denom) for j in range(z)]
                for i in range(z)
            ]
            for i in range(z):
                for j in range(i + 1, z):
                    rounded[j][i] = rounded[i][j]
            b, d = ldl_congruence(rounded)
            if any(x < 0 for x in d):
                raise IndefiniteError("negative diagonal after rounding")
            r0 = [list(row) for row in zip(*basis)]  # k x z
            r = [
                [sum(r0[i][a] * b[a][j] for a in range(z)) for j in range(z)]
                for i in range(len(r0))
            ] if z else [[] for _ in range(len(r0))]
            keep = [j for j in range(z) if d[j] != 0]
            factors.append(([[row[j] for j in keep] for row in r], [d[j] for j in keep]))
        return factors

    if target is None:
        # plain nearest-rational rounding at the full denominator bound
        try:
            factors = factor_at(q)
        except IndefiniteError as exc:
            raise CertificateError(
                f"rounding failed ({exc}); retry with a larger denominator bound q"
            )
        coeffs = _exact_coefficients(problem, factors)
        return RoundedSolution(factors, coeffs, max(coeffs))

    # with a target, grow denominators; coarse roundings snap simple exact
    # optima, fine ones are pinned to the target by a diagonal adjustment
    ladder = list(_denominator_ladder(q))
    last_error = "no rounding denominator produced a nonnegative diagonal"
    for denom in ladder:
        try:
            factors = factor_at(denom)
        except IndefiniteError as exc:
            last_error = str(exc)
            continue
        if _float_coefficients(problem, factors).max() <= float(target) + 1e-9:
            coeffs = _exact_coefficients(problem, factors)
            if max(coeffs) <= target:
                return RoundedSolution(factors, coeffs, max(coeffs))
        if denom >= ladder[-1] // _LADDER_GROWTH:
            coeffs = _exact_coefficients(problem, factors)
            pinned = _pin_to_target(problem, factors, coeffs, target, q)
            if pinned is not None:
                return pinned
            last_error = (
                f"achieved bound exceeds target {target} at denominator {denom} "
                f"and no diagonal adjustment fixes it"
            )
    raise CertificateError(
        f"rounding failed ({last_error}); retry with a larger denominator bound q"
    )


def _adjustment_weight(r, table, j) -> Fraction:
    """(R^T T R)_{jj} with integer arithmetic over common denominators."""
    k = len(r)
    col = [r[a][j] for a in range(k)]
    dc = _lcm([x.denominator for x in col] or [1])
    dt = _lcm([table[a][b].denominator for a in range(k) for b in range(k)] or [1])
    ints = [int(x * dc) for x in col]
    total = 0
    for a in range(k):
        ia = ints[a]
        if not ia:
            continue
        ta = table[a]
        for b in range(k):
            t = ta[b]
            if t and ints[b]:
                total += ia * ints[b] * int(t * dt)
    return Fraction(total, dc * dc * dt)


def _pin_to_target(problem, factors, coefficients, target, q) -> RoundedSolution | None:
    """Move every coefficient near the target onto it exactly by solving for
    a rational perturbation of the Q' diagonal entries.

    Positive-density subgraphs of an extremal construction must sit exactly
    at the bound, so after a fine rounding the coefficients cluster just
    around the target; the perturbation is tiny and the adjusted diagonals
    stay nonnegative.  Returns None when no consistent adjustment exists.
    """
    from .rational_linalg import rref

    deviations = [c - target for c in coefficients]
    over = max(deviations)
    if over <= 0:
        return None  # nothing to fix; caller accepts the plain rounding
    margin = max(4 * over, Fraction(2, q))
    near = [h for h, dev in enumerate(deviations) if dev >= -margin]
    slots = [(i, j) for i, (_, d) in enumerate(factors) for j in range(len(d))]
    if not slots:
        return None
    rows = []
    for h in near:
        row = []
        for i, (r, d) in enumerate(factors):
            table = problem.tables[i].tables[h]
            for j in range(len(d)):
                row.append(_adjustment_weight(r, table, j))
        row.append(target - coefficients[h])
        rows.append(row)
    reduced, pivots = rref(rows)
    if len(slots) in pivots:
        return None  # inconsistent system
    delta = [Fraction(0)] * len(slots)
    for rrow, p in zip(reduced, pivots):
        delta[p] = rrow[-1]
    adjusted = []
    pos = 0
    for r, d in factors:
        new_d = [x + delta[pos + j] for j, x in enumerate(d)]
        pos += len(d)
        if any(x < 0 for x in new_d):
            return None
        adjusted.append((r, new_d))
    coeffs = _exact_coefficients(problem, adjusted)
    achieved = max(coeffs)
    if achieved > target:
        return None
    return RoundedSolution(adjusted, coeffs, achieved)


# ---------------------------------------------------------------------------
# the certificate object


@dataclass
class Certificate:
    r: int
    maximize: str
    forbidden: list[str]
    forbidden_induced: list[str]
    bound: Fraction
    order: int
    admissible: list[str]
    types: list[str]
    flags: list[list[str]]
    qdash_matrices: list
    r_matrices: list
    description: str = ""

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "r": self.r,
            "maximize": self.maximize,
            "forbidden_graphs": list(self.forbidden),
            "forbidden_induced_graphs": list(self.forbidden_induced),
            "bound": format_rational(self.bound),
            "admissible_graph_order": self.order,
            "number_of_admissible_graphs": len(self.admissible),
            "admissible_graphs": list(self.admissible),
            "number_of_types": len(self.types),
            "types": list(self.types),
            "numbers_of_flags": [len(f) for f in self.flags],
            "flags": [list(f) for f in self.flags],
            "qdash_matrices": [
                _encode_upper_triangle(q) for q in self.qdash_matrices
            ],
            "r_matrices": [_encode_rows(r) for r in self.r_matrices],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def _encode_upper_triangle(matrix) -> list:
    """Symmetric matrix as rows of its upper triangle: [[a,b,c],[d,e],[f]]."""
    k = len(matrix)
    return [[format_rational(matrix[i][j]) for j in range(i, k)] for i in range(k)]


def _encode_rows(matrix) -> list:
    return [[format_rational(x) for x in row] for row in matrix]


def _decode_upper_triangle(rows) -> list[list[Fraction]]:
    k = len(rows)
    mat = [[Fraction(0)] * k for _ in range(k)]
    for i, row in enumerate(rows):
        if len(row) != k - i:
            raise CertificateError(
                f"upper-triangle row {i} has {len(row)} entries, expected {k - i}"
            )
        for off, value in enumerate(row):
            x = rational(value)
            mat[i][i + off] = x
            mat[i + off][i] = x
    return mat


def _decode_rows(rows) -> list[list[Fraction]]:
    out = [[rational(x) for x in row] for row in rows]
    if out and any(len(row) != len(out[0]) for row in out):
        raise CertificateError("ragged matrix rows")
    return out


_FLAG_RE = re.compile(r"^(\d:[0-9]*)\((\d+)\)$")


def parse_flag_notation(text: str, r: int, type_graph: TypeGraph) -> Flag:
    m = _FLAG_RE.match(text.strip())
    if not m:
        raise CertificateError(f"malformed flag notation {text!r}")
    graph = parse_graph(m.group(1), r)
    s = int(m.group(2))
    if s != type_graph.order:
        raise CertificateError(
            f"flag {text!r} declares {s} labelled vertices, type has {type_graph.order}"
        )
    try:
        return Flag(graph, type_graph)
    except GraphError as exc:
        raise CertificateError(f"flag {text!r}: {exc}") from exc


def parse_certificate(source) -> Certificate:
    """Read a certificate from a path, file object, JSON text or dict.
    Unknown fields are ignored; stated counts are checked when present."""
    if isinstance(source, Certificate):
        return source
    if isinstance(source, dict):
        data = source
    else:
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = str(source)
            if "\n" not in text and not text.lstrip().startswith("{"):
                with open(text) as fh:
                    text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CertificateError("certificate must be a JSON object")
    try:
        r = int(data["r"])
        bound = rational(data["bound"])
        order = int(data["admissible_graph_order"])
        admissible = [str(x) for x in data["admissible_graphs"]]
        types = [str(x) for x in data.get("types", [])]
        flags = [[str(x) for x in group] for group in data.get("flags", [])]
        qdash = data.get("qdash_matrices", [])
        rmats = data.get("r_matrices", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateError(f"missing or malformed field: {exc}") from exc
    if r not in (2, 3):
        raise CertificateError(f"uniformity must be 2 or 3, got {r}")
    counts = data.get("numbers_of_flags")
    if counts is not None and list(counts) != [len(f) for f in flags]:
        raise CertificateError("numbers_of_flags disagrees with the flag lists")
    ntypes = data.get("number_of_types")
    if ntypes is not None and int(ntypes) != len(types):
        raise CertificateError("number_of_types disagrees with the type list")
    ngraphs = data.get("number_of_admissible_graphs")
    if ngraphs is not None and int(ngraphs) != len(admissible):
        raise CertificateError(
            "number_of_admissible_graphs disagrees with the graph list"
        )
    if not (len(types) == len(flags) == len(qdash) == len(rmats)):
        raise CertificateError("types, flags, qdash_matrices, r_matrices differ in length")
    return Certificate(
        r=r,
        maximize=str(data.get("maximize", "3:123" if r == 3 else "2:12")),
        forbidden=[str(x) for x in data.get("forbidden_graphs", [])],
        forbidden_induced=[str(x) for x in data.get("forbidden_induced_graphs", [])],
        bound=bound,
        order=order,
        admissible=admissible,
        types=types,
        flags=flags,
        qdash_matrices=[_decode_upper_triangle(q) for q in qdash],
        r_matrices=[_decode_rows(m) for m in rmats],
        description=str(data.get("description", "")),
    )


def build_certificate(problem: SdpProblem, rounded: RoundedSolution, description: str = "") -> Certificate:
    spec = problem.spec
    qdash = []
    rmats = []
    for r, d in rounded.factors:
        z = len(d)
        qdash.append([[d[i] if i == j else Fraction(0) for j in range(z)] for i in range(z)])
        rmats.append([list(row) for row in r])
    if not description:
        parts = [f"{spec.r}-graph; maximize {problem_maximize(spec)} density"]
        if spec.forbidden:
            parts.append("forbid " + ", ".join(g.notation() for g in spec.forbidden))
        if spec.forbidden_induced:
            parts.append(
                "forbid induced " + ", ".join(g.notation() for g in spec.forbidden_induced)
            )
        description = "; ".join(parts)
    return Certificate(
        r=spec.r,
        maximize=problem_maximize(spec),
        forbidden=[g.notation() for g in spec.forbidden],
        forbidden_induced=[g.notation() for g in spec.forbidden_induced],
        bound=rounded.achieved,
        order=spec.m,
        admissible=[g.notation() for g in problem.graphs],
        types=[t.notation() for t in problem.types],
        flags=[[f.notation() for f in group] for group in problem.flags],
        qdash_matrices=qdash,
        r_matrices=rmats,
        description=description,
    )


def problem_maximize(spec: ProblemSpec) -> str:
    return "3:123" if spec.r == 3 else "2:12"


def emit_certificate(
    problem: SdpProblem, rounded: RoundedSolution, destination, description: str = ""
) -> Certificate:
    """Write the certificate after verifying it internally; an unverifiable
    certificate is never emitted."""
    cert = build_certificate(problem, rounded, description)
    report = verify_certificate(cert)
    if not report.ok:
        raise CertificateError(
            f"internal verification failed before emission: {report.message}"
        )
    text = cert.to_json()
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w") as fh:
                fh.write(text)
    return cert


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    """Outcome of the four verification stages.

    Stage 1 re-enumerates the admissible family; stage 2 recomputes all
    densities from the certificate's own lists; stage 3 reconstructs the
    Q matrices exactly and checks positive semidefiniteness; stage 4
    compares the maximal flag algebra coefficient with the claimed bound.
    """

    claimed: Fraction
    admissible_family_complete: bool = False
    psd_ok: bool = False
    coefficients: list[Fraction] = field(default_factory=list)
    achieved: Fraction | None = None
    bound_ok: bool = False
    tight: list[str] = field(default_factory=list)
    failed_stage: int | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.failed_stage is None and self.bound_ok


def _fail(report: VerificationReport, stage: int, message: str) -> VerificationReport:
    report.failed_stage = stage
    report.message = f"stage {stage} failed: {message}"
    return report


def verify_certificate(source) -> VerificationReport:
    """Independently verify a certificate; no stored quantity is trusted.

    Raises CertificateError if the input cannot be parsed at all;
    otherwise always returns a report with the failing stage attributed.
    """
    cert = parse_certificate(source)
    report = VerificationReport(claimed=cert.bound)

    # stage 1: the admissible family is complete and duplicate-free
    try:
        forbidden = tuple(parse_graph(g, cert.r) for g in cert.forbidden)
        forbidden_induced = tuple(parse_graph(g, cert.r) for g in cert.forbidden_induced)
        spec = ProblemSpec(cert.r, forbidden, forbidden_induced, cert.order)
        listed = [parse_graph(g, cert.r) for g in cert.admissible]
    except GraphError as exc:
        return _fail(report, 1, str(exc))
    if any(g.n != cert.order for g in listed):
        return _fail(report, 1, "admissible graph of wrong order")
    listed_keys = [canonical_key(g) for g in listed]
    if len(set(listed_keys)) != len(listed_keys):
        return _fail(report, 1, "duplicate isomorphism class in the admissible list")
    expected = {canonical_key(g) for g in admissible_graphs(spec, cert.order)}
    missing = expected - set(listed_keys)
    extra = set(listed_keys) - expected
    if missing:
        return _fail(
            report, 1, f"family incomplete: missing {', '.join(sorted(missing))}"
        )
    if extra:
        return _fail(
            report, 1, f"inadmissible graphs listed: {', '.join(sorted(extra))}"
        )
    report.admissible_family_complete = True

    # stage 2: densities and flag pair density tables from the certificate's
    # own type and flag lists, in listed order
    try:
        densities = [edge_density(g) for g in listed]
        type_graphs = [TypeGraph(parse_graph(t, cert.r)) for t in cert.types]
        flag_lists = []
        for t, group in zip(type_graphs, cert.flags):
            flags = [parse_flag_notation(f, cert.r, t) for f in group]
            orders = {f.order for f in flags}
            if len(orders) > 1:
                raise CertificateError(f"type {t}: flags of mixed order")
            if flags and 2 * flags[0].order - t.order > cert.order:
                raise CertificateError(
                    f"type {t}: flag order {flags[0].order} too large for m = {cert.order}"
                )
            flag_lists.append(flags)
        tables = [
            [flag_pair_density_table(t, flags, h) for h in listed] if flags else None
            for t, flags in zip(type_graphs, flag_lists)
        ]
    except (CertificateError, GraphError) as exc:
        return _fail(report, 2, str(exc))

    # stage 3: Q = R Q' R^T with Q' certified PSD in exact arithmetic
    q_matrices = []
    for idx, (flags, qdash, rmat) in enumerate(
        zip(flag_lists, cert.qdash_matrices, cert.r_matrices)
    ):
        k = len(flags)
        z = len(qdash)
        if len(rmat) != k or (rmat and len(rmat[0]) != z):
            return _fail(
                report,
                3,
                f"type {idx}: R is {len(rmat)}x{len(rmat[0]) if rmat else 0}, "
                f"expected {k}x{z}",
            )
        diagonal = all(qdash[i][j] == 0 for i in range(z) for j in range(z) if i != j)
        if diagonal:
            if any(qdash[i][i] < 0 for i in range(z)):
                return _fail(report, 3, f"type {idx}: Q' has a negative diagonal entry")
        else:
            try:
                _, d = ldl_congruence(qdash)
            except IndefiniteError:
                return _fail(report, 3, f"type {idx}: Q' is not PSD")
            if any(x < 0 for x in d):
                return _fail(report, 3, f"type {idx}: Q' is not PSD")
        q = [
            [
                sum(rmat[a][i] * qdash[i][j] * rmat[b][j] for i in range(z) for j in range(z))
                for b in range(k)
            ]
            for a in range(k)
        ]
        q_matrices.append(q)
    report.psd_ok = True

    # stage 4: every flag algebra coefficient at most the claimed bound
    coefficients = []
    for h_idx, (h, dh) in enumerate(zip(listed, densities)):
        total = dh
        for table, q, flags in zip(tables, q_matrices, flag_lists):
            if table is None:
                continue
            mat = table[h_idx]
            k = len(flags)
            total += sum(q[a][b] * mat[a][b] for a in range(k) for b in range(k))
        coefficients.append(total)
    report.coefficients = coefficients
    achieved = max(coefficients) if coefficients else Fraction(0)
    report.achieved = achieved
    report.tight = [
        g.notation() for g, c in zip(listed, coefficients) if c == achieved
    ]
    report.bound_ok = achieved <= cert.bound
    if not report.bound_ok:
        return _fail(
            report,
            4,
            f"achieved bound {achieved} exceeds the claimed bound {cert.bound}",
        )
    return report


# ---------------------------------------------------------------------------
# one-call pipeline


def certify_problem(
    problem: SdpProblem,
    solution: SdpSolution,
    construction: ConstructionTemplate | None = None,
    q: int = DEFAULT_DENOMINATOR,
    target=None,
    destination=None,
    residual_tol: float = 1e-3,
) -> Certificate:
    """Round a floating solution, build the certificate, verify it
    internally and (optionally) write it out."""
    if construction is not None:
        rounded = round_with_construction(
            solution, construction, problem, q=q, target=target, residual_tol=residual_tol
        )
    else:
        rounded = rounded_from_matrices(problem, round_simple(solution, q))
        if target is not None and rounded.achieved > rational(target):
            raise CertificateError(
                f"plain rounding achieved {rounded.achieved} > target {target}; "
                f"supply a construction or a larger q"
            )
    return emit_certificate(problem, rounded, destination)
