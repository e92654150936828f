"""Semidefinite programming layer: assembling the bound optimisation,
sparse-format interchange with external solvers, and an internal dense
solver for small instances.

The optimisation is: minimise c subject to, for every admissible graph H,

    d(H) + sum_i <Q_i, D_i(H)>  <=  c,        Q_i positive semidefinite,

with one symmetric matrix block per intersection type, indexed by that
type's flags.  The internal solver follows the central path of the exact
feasible formulation with a logarithmic barrier, so every iterate is
feasible and the reported bound is always valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .densities import DensityTable, build_density_table, edge_density
from .enumeration import (
    Flag,
    ProblemSpec,
    TypeGraph,
    admissible_graphs,
    default_flag_order,
    enumerate_flags,
    enumerate_types,
)
from .graphs import UniformGraph

MAX_INTERNAL_DIMENSION = 60
MAX_INTERNAL_CONSTRAINTS = 500


class SdpError(RuntimeError):
    """Assembly, interchange or solver failure."""


@dataclass
class SdpProblem:
    """Assembled bound problem: admissible graphs, their edge densities,
    and one flag-pair density table per intersection type."""

    spec: ProblemSpec
    graphs: list[UniformGraph]
    densities: list[Fraction]
    types: list[TypeGraph]
    flags: list[list[Flag]]
    tables: list[DensityTable]
    _float_tables: list = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def block_sizes(self) -> list[int]:
        return [len(f) for f in self.flags]

    @property
    def degenerate(self) -> bool:
        return not self.graphs or not self.types

    def float_tables(self) -> list[np.ndarray]:
        """Per type, array of shape (#graphs, k, k) of float64 densities."""
        if self._float_tables is None:
            self._float_tables = [
                np.array(
                    [[[float(x) for x in row] for row in mat] for mat in table.tables]
                )
                for table in self.tables
            ]
        return self._float_tables

    def coefficient(self, h_index: int, q_matrices) -> Fraction:
        """Exact d(H) + sum_i <Q_i, D_i(H)> for rational Q matrices."""
        total = self.densities[h_index]
        for table, q in zip(self.tables, q_matrices):
            mat = table.tables[h_index]
            k = len(mat)
            total += sum(q[a][b] * mat[a][b] for a in range(k) for b in range(k))
        return total


def assemble(spec: ProblemSpec) -> SdpProblem:
    """Build the problem from the admissible family, the default types and
    flag orders, and exact flag-pair density tables."""
    graphs = admissible_graphs(spec, spec.m)
    if not graphs:
        return SdpProblem(spec, [], [], [], [], [])
    densities = [edge_density(h) for h in graphs]
    types, flag_lists, tables = [], [], []
    for t in enumerate_types(spec):
        flags = enumerate_flags(t, default_flag_order(spec, t), spec)
        if not flags:
            continue  # nothing to contribute
        types.append(t)
        flag_lists.append(flags)
        tables.append(build_density_table(t, flags, graphs))
    return SdpProblem(spec, graphs, densities, types, flag_lists, tables)


@dataclass
class SdpSolution:
    """Floating-point solution: per-type symmetric matrices and the bound
    they achieve (the exact maximum of the constraint left-hand sides)."""

    bound: float
    matrices: list[np.ndarray]
    gap: float = 0.0
    worst_violation: float = 0.0
    note: str = ""


# ---------------------------------------------------------------------------
# sparse interchange (SDPA-style .dat-s)


def _sdpa_number(x: Fraction) -> str:
    """Shortest exact decimal when the denominator is 2^a 5^b, otherwise the
    float value at full (17 significant digit) precision."""
    d = x.denominator
    a = b = 0
    while d % 2 == 0:
        d //= 2
        a += 1
    while d % 5 == 0:
        d //= 5
        b += 1
    if d == 1:
        k = max(a, b)
        scaled = x.numerator * 10**k // x.denominator
        if k == 0:
            return str(scaled)
        sign = "-" if scaled < 0 else ""
        digits = str(abs(scaled)).rjust(k + 1, "0")
        return f"{sign}{digits[:-k]}.{digits[-k:]}".rstrip("0").rstrip(".")
    return repr(float(x))


def export_sparse_sdp(problem: SdpProblem, destination) -> str:
    """Write the problem in sparse SDPA text form and return the text.

    Scalar variables are the objective value c followed by the upper
    triangles of the Q blocks; the matrix inequality collects the Q blocks
    and one diagonal slack block with a row per admissible graph.
    """
    if problem.degenerate:
        raise SdpError(
            "degenerate problem (no admissible graphs or no types); nothing to export"
        )
    sizes = problem.block_sizes
    nh = len(problem.graphs)
    nvar = 1 + sum(k * (k + 1) // 2 for k in sizes)
    slack_block = len(sizes) + 1

    lines = [str(nvar), str(slack_block)]
    lines.append(" ".join([str(k) for k in sizes] + [str(-nh)]))
    lines.append(" ".join(["1"] + ["0"] * (nvar - 1)))

    entries = []
    # constant matrix F0: slack diagonal carries the edge densities
    for h, dh in enumerate(problem.densities):
        if dh:
            entries.append((0, slack_block, h + 1, h + 1, _sdpa_number(dh)))
    # variable 1 is c: +1 on every slack row
    for h in range(nh):
        entries.append((1, slack_block, h + 1, h + 1, "1"))
    var = 1
    for i, (k, table) in enumerate(zip(sizes, problem.tables)):
        for p in range(k):
            for q in range(p, k):
                var += 1
                entries.append((var, i + 1, p + 1, q + 1, "1"))
                factor = 1 if p == q else 2
                for h in range(nh):
                    value = table.tables[h][p][q]
                    if value:
                        entries.append(
                            (var, slack_block, h + 1, h + 1, _sdpa_number(-factor * value))
                        )
    lines.extend(f"{m} {b} {i} {j} {v}" for m, b, i, j, v in entries)
    text = "\n".join(lines) + "\n"
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            with open(destination, "w") as fh:
                fh.write(text)
    return text


def parse_sparse_sdp(source) -> dict:
    """Parse SDPA sparse text back into its structural pieces (used for
    round-trip checks and external cross-checks)."""
    text = source.read() if hasattr(source, "read") else open(source).read()
    rows = [
        line.split()
        for line in text.splitlines()
        if line.strip() and line.lstrip()[0] not in "*\""
    ]
    if len(rows) < 4:
        raise SdpError("truncated SDPA file: missing header")
    nvar = int(rows[0][0])
    nblocks = int(rows[1][0])
    sizes = [int(x) for x in rows[2]]
    if len(sizes) != nblocks:
        raise SdpError("block size list does not match block count")
    objective = [float(x) for x in rows[3]]
    if len(objective) != nvar:
        raise SdpError("objective row does not match variable count")
    entries = []
    for row in rows[4:]:
        if len(row) != 5:
            raise SdpError(f"malformed entry line: {' '.join(row)!r}")
        entries.append((int(row[0]), int(row[1]), int(row[2]), int(row[3]), float(row[4])))
    return {"nvar": nvar, "sizes": sizes, "objective": objective, "entries": entries}


def import_solution(problem: SdpProblem, source) -> SdpSolution:
    """Read a solver's solution text for the exported problem.

    Expected layout: first line the vector of scalar variables, then sparse
    quintuples ``matno blkno i j value`` with matno 1 holding the matrix
    inequality value (whose leading blocks are the Q matrices).
    """
    if problem.degenerate:
        raise SdpError("degenerate problem has no solutions to import")
    text = source.read() if hasattr(source, "read") else open(source).read()
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines:
        raise SdpError("empty solution file")
    sizes = problem.block_sizes
    nvar = 1 + sum(k * (k + 1) // 2 for k in sizes)
    head = lines[0].split()
    if len(head) != nvar:
        raise SdpError(f"variable vector has {len(head)} entries, expected {nvar}")
    mats = [np.zeros((k, k)) for k in sizes]
    filled = [np.zeros((k, k), dtype=bool) for k in sizes]
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 5:
            raise SdpError(f"malformed solution line: {line!r}")
        matno, blk, i, j = (int(x) for x in parts[:4])
        value = float(parts[4])
        if matno != 1 or blk > len(sizes):
            continue  # dual certificate / slack entries are not needed
        k = sizes[blk - 1]
        if not (1 <= i <= k and 1 <= j <= k):
            raise SdpError(f"entry ({i},{j}) outside block {blk} of size {k}")
        mats[blk - 1][i - 1, j - 1] = value
        mats[blk - 1][j - 1, i - 1] = value
        filled[blk - 1][i - 1, j - 1] = True
    for blk, (k, got) in enumerate(zip(sizes, filled), start=1):
        if k and not got.any():
            raise SdpError(f"solution is missing block {blk} (size {k})")
    mats = [(q + q.T) / 2 for q in mats]
    bound, worst = _achieved_bound(problem, mats)
    return SdpSolution(bound=bound, matrices=mats, worst_violation=worst)


def _achieved_bound(problem: SdpProblem, mats) -> tuple[float, float]:
    lhs = np.array([float(d) for d in problem.densities])
    for table, q in zip(problem.float_tables(), mats):
        lhs = lhs + np.einsum("hpq,pq->h", table, q)
    bound = float(lhs.max())
    return bound, 0.0 if len(lhs) == 0 else float((lhs - bound).max())


# ---------------------------------------------------------------------------
# internal solver


def solve_small(
    problem: SdpProblem,
    tolerance: float = 1e-7,
    force: bool = False,
    max_newton: int = 5000,
) -> SdpSolution:
    """Solve in process with a dense feasible-path barrier method.

    Every iterate satisfies all constraints, so the reported bound (the
    exact maximum left-hand side) is valid at any point; the method stops
    once the centring gap guarantees the bound is within `tolerance` of
    the optimum.  The Newton system is solved in the block structure: the
    matrix directions are eliminated analytically against the barrier
    Hessian (whose inverse is a congruence with Q), leaving one dense
    system indexed by the admissible graphs.  Instances above the internal
    caps are rejected unless `force` is given; export the problem for an
    external solver instead.
    """
    if not problem.graphs:
        return SdpSolution(0.0, [], note="no admissible graphs; bound is trivially 0")
    sizes = problem.block_sizes
    if not sizes:
        bound = max(problem.densities)
        return SdpSolution(
            float(bound), [], note="no types with flags; bound is max edge density"
        )
    if not force and sum(sizes) > MAX_INTERNAL_DIMENSION:
        raise SdpError(
            f"total block dimension {sum(sizes)} exceeds the internal cap "
            f"{MAX_INTERNAL_DIMENSION}; use export_sparse_sdp and an external solver"
        )
    if not force and len(problem.graphs) > MAX_INTERNAL_CONSTRAINTS:
        raise SdpError(
            f"{len(problem.graphs)} constraints exceed the internal cap "
            f"{MAX_INTERNAL_CONSTRAINTS}; use export_sparse_sdp and an external solver"
        )

    d = np.array([float(x) for x in problem.densities])
    nh = len(d)
    tables = problem.float_tables()

    def slacks(c, qs):
        s = np.full(nh, c) - d
        for table, q in zip(tables, qs):
            s -= np.einsum("hpq,pq->h", table, q)
        return s

    def barrier(c, qs, t):
        s = slacks(c, qs)
        if s.min() <= 0:
            return np.inf
        value = t * c - np.log(s).sum()
        for q in qs:
            try:
                value -= 2 * np.log(np.diag(np.linalg.cholesky(q))).sum()
            except np.linalg.LinAlgError:
                return np.inf
        return value

    qs = [1e-2 * np.eye(k) for k in sizes]
    c = float((d + sum(np.einsum("hpq,pq->h", T, q) for T, q in zip(tables, qs))).max()) + 1.0
    nu = nh + sum(sizes)
    t = 1.0
    newton_steps = 0

    while True:
        for _ in range(80):
            newton_steps += 1
            if newton_steps > max_newton:
                raise SdpError("internal solver did not converge within the step limit")
            s = slacks(c, qs)
            w = 1.0 / s**2
            inv_s = 1.0 / s
            g_c = t - inv_s.sum()
            grads = []
            sandwiched = []  # E_i[h] = Q_i T_i[h] Q_i
            pushed = []  # P_i = Q_i G_i Q_i
            kernel = np.zeros((nh, nh))
            p_vec = np.zeros(nh)
            for table, q in zip(tables, qs):
                k = q.shape[0]
                flat = table.reshape(nh, k * k)
                g_i = (inv_s @ flat).reshape(k, k) - np.linalg.inv(q)
                e_i = np.matmul(np.matmul(q, table), q)
                p_i = q @ g_i @ q
                kernel += flat @ e_i.reshape(nh, k * k).T
                p_vec += flat @ p_i.reshape(k * k)
                grads.append(g_i)
                sandwiched.append(e_i)
                pushed.append(p_i)
            # scale symmetrically: I + W^{1/2} K W^{1/2} has eigenvalues >= 1
            root_w = np.sqrt(w)
            lhs = np.eye(nh) + kernel * np.outer(root_w, root_w)
            try:
                scaled = np.linalg.solve(lhs, np.column_stack([root_w, root_w * p_vec]))
            except np.linalg.LinAlgError:
                break
            gamma1 = scaled[:, 0] / root_w
            gamma2 = scaled[:, 1] / root_w
            denom = float(w @ gamma1)
            dc = (-g_c - float(w @ gamma2)) / denom
            gamma = dc * gamma1 + gamma2
            dqs = [
                np.tensordot(w * gamma, e_i, axes=(0, 0)) - p_i
                for e_i, p_i in zip(sandwiched, pushed)
            ]
            decrement = -(g_c * dc + sum(float((g * dq).sum()) for g, dq in zip(grads, dqs)))
            if not np.isfinite(decrement) or decrement / 2 <= 1e-10:
                break
            # feasible step length on the slacks, then backtracking descent
            ds = np.full(nh, dc) - sum(
                np.einsum("hpq,pq->h", T, dq) for T, dq in zip(tables, dqs)
            )
            neg = ds < 0
            alpha = 1.0
            if neg.any():
                alpha = min(alpha, 0.99 * float((s[neg] / -ds[neg]).min()))
            base = barrier(c, qs, t)
            while alpha > 1e-13:
                cand_c = c + alpha * dc
                cand_qs = [q + alpha * dq for q, dq in zip(qs, dqs)]
                if barrier(cand_c, cand_qs, t) < base - 1e-14:
                    c, qs = cand_c, cand_qs
                    break
                alpha *= 0.5
            else:
                break
        if nu / t <= tolerance / 2 or t > 1e16:
            break
        t *= 10.0

    qs = [(q + q.T) / 2 for q in qs]
    bound, worst = _achieved_bound(problem, qs)
    return SdpSolution(bound=bound, matrices=qs, gap=nu / t, worst_violation=worst)
