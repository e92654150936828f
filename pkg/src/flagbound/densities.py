"""Exact rational subgraph, edge and flag-pair densities.

Everything is computed by complete enumeration over vertex subsets and
injections; there is no sampling and no floating point.  Results are
memoised per canonical form, and depend only on isomorphism classes.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .enumeration import Flag, TypeGraph, flag_key
from .graphs import (
    GraphError,
    UniformGraph,
    canonical_graph,
    canonical_key,
    falling,
    format_rational,
    induced_subgraph,
)

Matrix = tuple[tuple[Fraction, ...], ...]


def edge_density(h: UniformGraph) -> Fraction:
    """|E| / C(n, r)."""
    if h.n < h.r:
        raise GraphError(f"graph of order {h.n} has no {h.r}-subsets")
    return Fraction(len(h.edges), comb(h.n, h.r))


@lru_cache(maxsize=None)
def induced_profile(g: UniformGraph, k: int) -> dict:
    """Counts of induced order-k subgraphs of g, keyed by canonical form."""
    if k < 0 or k > g.n:
        raise GraphError(f"profile order {k} outside 0..{g.n}")
    counts = Counter()
    for sub in itertools.combinations(range(1, g.n + 1), k):
        counts[canonical_key(induced_subgraph(g, sub))] += 1
    return dict(counts)


def subgraph_density(h: UniformGraph, g: UniformGraph) -> Fraction:
    """Probability that a uniformly random |V(h)|-subset of V(g) induces a
    copy of h."""
    if h.r != g.r:
        raise GraphError("uniformity mismatch")
    if h.n > g.n:
        raise GraphError(f"order mismatch: {h.n} > {g.n}")
    profile = induced_profile(g, h.n)
    return Fraction(profile.get(canonical_key(h), 0), comb(g.n, h.n))


def _induces_type(h_edges: frozenset, theta: tuple[int, ...], type_graph: TypeGraph) -> bool:
    """Does labelling vertex theta[i] with i+1 induce exactly the type?"""
    want = set(type_graph.graph.edges)
    have = set()
    for sub in itertools.combinations(range(len(theta)), type_graph.graph.r):
        if tuple(sorted(theta[i] for i in sub)) in h_edges:
            have.add(tuple(v + 1 for v in sub))
    return have == want


def type_density(type_graph: TypeGraph, h: UniformGraph) -> Fraction:
    """Probability that a random injective labelling of the type's vertices
    into V(h) induces a copy of the type (label for label)."""
    s = type_graph.order
    if h.n < s:
        raise GraphError(f"graph of order {h.n} too small for type of order {s}")
    h_edges = h.edge_set
    hits = sum(
        1
        for theta in itertools.permutations(range(1, h.n + 1), s)
        if _induces_type(h_edges, theta, type_graph)
    )
    return Fraction(hits, falling(h.n, s))


def _extension_key(
    h_edges: frozenset, theta: tuple[int, ...], free: tuple[int, ...], r: int, s: int
) -> tuple:
    """Label-fixing canonical key of the flag induced by theta plus free."""
    vertices = theta + free
    edges = []
    for sub in itertools.combinations(range(len(vertices)), r):
        if tuple(sorted(vertices[i] for i in sub)) in h_edges:
            edges.append(tuple(i + 1 for i in sub))
    g = UniformGraph(r, len(vertices), tuple(edges))
    return flag_key(g, s)


def flag_pair_density_table(type_graph: TypeGraph, flags: list[Flag], h: UniformGraph) -> Matrix:
    """Symmetric matrix of flag-pair densities d_{F,F'}(h).

    Entry (F, F') is the probability that a uniformly random injective
    labelling of the type into V(h), followed by two disjoint uniformly
    random (l-s)-sets of the remaining vertices, induces label-respecting
    copies of F and F'.  Labellings that fail to induce the type remain in
    the probability space and contribute zero everywhere.
    """
    return _table_cached(type_graph, tuple(flags), canonical_graph(h))


@lru_cache(maxsize=None)
def _table_cached(type_graph: TypeGraph, flags: tuple[Flag, ...], h: UniformGraph) -> Matrix:
    if not flags:
        return ()
    s = type_graph.order
    orders = {f.order for f in flags}
    if len(orders) != 1:
        raise GraphError("flags of mixed order")
    (l,) = orders
    f = l - s
    r = h.r
    if any(fl.type != type_graph for fl in flags):
        raise GraphError("flag does not belong to the type")
    if h.n < 2 * l - s:
        raise GraphError(f"graph of order {h.n} too small: need {2 * l - s}")

    index = {flag_key(fl.graph, s): i for i, fl in enumerate(flags)}
    k = len(flags)
    counts = [[0] * k for _ in range(k)]
    h_edges = h.edge_set

    for theta in itertools.permutations(range(1, h.n + 1), s):
        if not _induces_type(h_edges, theta, type_graph):
            continue
        rest = [v for v in range(1, h.n + 1) if v not in theta]
        for s1 in itertools.combinations(rest, f):
            i1 = index.get(_extension_key(h_edges, theta, s1, r, s))
            if i1 is None:
                continue
            rest2 = [v for v in rest if v not in s1]
            for s2 in itertools.combinations(rest2, f):
                i2 = index.get(_extension_key(h_edges, theta, s2, r, s))
                if i2 is not None:
                    counts[i1][i2] += 1

    total = falling(h.n, s) * comb(h.n - s, f) * comb(h.n - s - f, f)
    return tuple(tuple(Fraction(c, total) for c in row) for row in counts)


def averaging_check(type_graph: TypeGraph, flags: list[Flag], g: UniformGraph, m: int) -> bool:
    """Exact identity d_{F,F'}(g) = sum_H d_H(g) d_{F,F'}(H), the H-sum over
    all order-m isomorphism classes.  A test oracle; expected always true."""
    s = type_graph.order
    orders = {f.order for f in flags}
    if len(orders) != 1:
        raise GraphError("flags of mixed order")
    (l,) = orders
    if not (g.n >= m >= 2 * l - s):
        raise GraphError(f"need |V| >= m >= 2l-s, got {g.n}, {m}, {2 * l - s}")

    lhs = flag_pair_density_table(type_graph, flags, g)
    k = len(flags)
    rhs = [[Fraction(0)] * k for _ in range(k)]
    profile = induced_profile(g, m)
    denom = comb(g.n, m)
    from .graphs import parse_graph

    for key, count in profile.items():
        h = parse_graph(key, g.r)
        tab = flag_pair_density_table(type_graph, flags, h)
        w = Fraction(count, denom)
        for a in range(k):
            for b in range(k):
                rhs[a][b] += w * tab[a][b]
    return all(lhs[a][b] == rhs[a][b] for a in range(k) for b in range(k))


@dataclass(frozen=True)
class DensityTable:
    """Per-type table: one symmetric rational matrix per admissible graph."""

    type: TypeGraph
    flags: tuple[Flag, ...]
    tables: tuple[Matrix, ...]  # aligned with the admissible graph list

    def matrix(self, h_index: int) -> Matrix:
        return self.tables[h_index]


def build_density_table(
    type_graph: TypeGraph, flags: list[Flag], admissible: list[UniformGraph]
) -> DensityTable:
    return DensityTable(
        type_graph,
        tuple(flags),
        tuple(flag_pair_density_table(type_graph, flags, h) for h in admissible),
    )


def table_lines(table: DensityTable, admissible: list[UniformGraph]):
    """Plain-text export: one line per (H, F, F', value)."""
    for h, mat in zip(admissible, table.tables):
        for fl, row in zip(table.flags, mat):
            for fl2, value in zip(table.flags, row):
                yield f"{h.notation()} {fl.notation()} {fl2.notation()} {format_rational(value)}"
