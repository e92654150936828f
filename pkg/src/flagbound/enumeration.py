"""Isomorph-free generation of admissible graphs, types and flags.

Admissible graphs of order k are generated by extending each admissible
graph of order k-1 with one new vertex in every possible way, then
deduplicating by canonical form.  A graph that contains a forbidden
configuration can never lose it by gaining vertices, so pruning at every
order keeps the search exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .graphs import (
    GraphError,
    UniformGraph,
    _subsets,
    canonical_graph,
    canonical_key,
    canonical_value,
    contains_induced,
    contains_subgraph,
    induced_subgraph,
)

MAX_ADMISSIBLE_ORDER = 7


@dataclass(frozen=True)
class ProblemSpec:
    """A Turán-type problem: uniformity, forbidden configurations, and the
    order m of the admissible graphs used in the bound."""

    r: int
    forbidden: tuple[UniformGraph, ...]
    forbidden_induced: tuple[UniformGraph, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        object.__setattr__(self, "forbidden_induced", tuple(self.forbidden_induced))
        if not 2 <= self.m <= MAX_ADMISSIBLE_ORDER:
            raise GraphError(f"admissible order m must be in 2..{MAX_ADMISSIBLE_ORDER}")
        for g in self.forbidden + self.forbidden_induced:
            if g.r != self.r:
                raise GraphError(f"forbidden graph {g} has uniformity {g.r}, expected {self.r}")
            if g.n > self.m:
                raise GraphError(f"forbidden graph {g} has order {g.n} > m = {self.m}")


@dataclass(frozen=True)
class TypeGraph:
    """An intersection type: an admissible graph whose vertices 1..s are
    all labelled, by their own indices."""

    graph: UniformGraph

    @property
    def order(self) -> int:
        return self.graph.n

    def notation(self) -> str:
        return self.graph.notation()

    def __str__(self) -> str:
        return self.notation()


@dataclass(frozen=True)
class Flag:
    """An admissible graph whose first s vertices carry a type's labels.

    Two flags are the same iff an isomorphism fixing every labelled vertex
    maps one to the other, so the free vertices s+1..l may be permuted.
    """

    graph: UniformGraph
    type: TypeGraph

    def __post_init__(self):
        s = self.type.order
        if self.graph.n < s:
            raise GraphError("flag smaller than its type")
        prefix = induced_subgraph(self.graph, range(1, s + 1))
        if prefix.edges != self.type.graph.edges:
            raise GraphError("labelled prefix does not induce the type")

    @property
    def order(self) -> int:
        return self.graph.n

    @property
    def labelled(self) -> int:
        return self.type.order

    def notation(self) -> str:
        return f"{self.graph.notation()}({self.labelled})"

    def __str__(self) -> str:
        return self.notation()


def flag_key(graph: UniformGraph, s: int) -> tuple[tuple[int, ...], ...]:
    """Minimal edge list over permutations fixing vertices 1..s pointwise."""
    free = range(s + 1, graph.n + 1)
    best = None
    for perm in itertools.permutations(free):
        mapping = list(range(graph.n + 1))
        for i, v in enumerate(free):
            mapping[v] = perm[i]
        image = sorted(tuple(sorted(mapping[v] for v in e)) for e in graph.edges)
        if best is None or image < best:
            best = image
    return tuple(best) if best is not None else ()


def canonical_flag(graph: UniformGraph, type_graph: TypeGraph) -> Flag:
    return Flag(UniformGraph(graph.r, graph.n, flag_key(graph, type_graph.order)), type_graph)


def _is_admissible(g: UniformGraph, spec: ProblemSpec) -> bool:
    return not any(contains_subgraph(g, f) for f in spec.forbidden) and not any(
        contains_induced(g, f) for f in spec.forbidden_induced
    )


_ADMISSIBLE_CACHE: dict = {}


def admissible_graphs(spec: ProblemSpec, k: int) -> list[UniformGraph]:
    """One canonical representative per isomorphism class of order-k graphs
    avoiding every forbidden configuration, sorted by canonical form."""
    if k < 0 or k > spec.m:
        raise GraphError(f"order {k} outside 0..m = {spec.m}")
    key = (spec, k)
    if key in _ADMISSIBLE_CACHE:
        return list(_ADMISSIBLE_CACHE[key])

    empty = UniformGraph(spec.r, 0, ())
    level = [empty] if _is_admissible(empty, spec) else []
    _ADMISSIBLE_CACHE[(spec, 0)] = list(level)
    for j in range(1, k + 1):
        if (spec, j) in _ADMISSIBLE_CACHE:
            level = list(_ADMISSIBLE_CACHE[(spec, j)])
            continue
        level = _extend_level(level, spec, j)
        _ADMISSIBLE_CACHE[(spec, j)] = list(level)
    return list(level)


def _extend_level(parents: list[UniformGraph], spec: ProblemSpec, j: int) -> list[UniformGraph]:
    r = spec.r
    rank = {s: i for i, s in enumerate(_subsets(j, r))}
    # Edges through the new vertex j: an (r-1)-subset of 1..j-1 plus j.
    new_edge_sets = list(itertools.combinations(range(1, j), r - 1))
    new_ranks = [rank[tuple(sorted([v - 1 for v in e] + [j - 1]))] for e in new_edge_sets]

    seen = {}
    for parent in parents:
        parent_ranks = [rank[tuple(v - 1 for v in e)] for e in parent.edges]
        for mask in range(1 << len(new_edge_sets)):
            chosen = [i for i in range(len(new_edge_sets)) if mask >> i & 1]
            value = canonical_value(r, j, parent_ranks + [new_ranks[i] for i in chosen])
            if value in seen:
                continue
            edges = parent.edges + tuple(
                tuple(sorted(new_edge_sets[i] + (j,))) for i in chosen
            )
            seen[value] = UniformGraph(r, j, edges)

    survivors = [
        canonical_graph(g) for g in seen.values() if _is_admissible(g, spec)
    ]
    survivors.sort(key=lambda g: g.notation())
    return survivors


def enumerate_types(spec: ProblemSpec) -> list[TypeGraph]:
    """All admissible types of order s = m (mod 2), 0 <= s <= m-2, one per
    isomorphism class of underlying graphs, fully labelled 1..s."""
    out = []
    for s in range(spec.m % 2, spec.m - 1, 2):
        out.extend(TypeGraph(g) for g in admissible_graphs(spec, s))
    return out


def default_flag_order(spec: ProblemSpec, type_graph: TypeGraph) -> int:
    """Flag order used in the standard pipeline: the type plus (m-s)/2 free
    vertices, so two disjoint extensions fit in an order-m graph."""
    return (spec.m + type_graph.order) // 2


def enumerate_flags(type_graph: TypeGraph, l: int, spec: ProblemSpec) -> list[Flag]:
    """All admissible flags of order l over the given type, one per class
    under isomorphisms fixing the labelled vertices, in key order."""
    s = type_graph.order
    if l < s:
        raise GraphError(f"flag order {l} below type order {s}")
    if l > spec.m:
        raise GraphError(f"flag order {l} above m = {spec.m}")
    r = spec.r
    base = type_graph.graph.edges
    candidates = [
        e
        for e in itertools.combinations(range(1, l + 1), r)
        if max(e) > s  # edges inside the labelled prefix are fixed by the type
    ]
    seen = {}
    for mask in range(1 << len(candidates)):
        extra = tuple(candidates[i] for i in range(len(candidates)) if mask >> i & 1)
        g = UniformGraph(r, l, base + extra)
        key = flag_key(g, s)
        if key in seen or not _is_admissible(g, spec):
            continue
        seen[key] = Flag(UniformGraph(r, l, key), type_graph)
    return [seen[k] for k in sorted(seen)]


def write_graph_list(graphs: list[UniformGraph], path) -> None:
    """Plain-text cache: one notation per line."""
    with open(path, "w") as fh:
        for g in graphs:
            fh.write(g.notation() + "\n")


def read_graph_list(path, r: int) -> list[UniformGraph]:
    from .graphs import parse_graph

    with open(path) as fh:
        return [parse_graph(line.strip(), r) for line in fh if line.strip()]


@lru_cache(maxsize=None)
def unrestricted_spec(r: int, m: int) -> ProblemSpec:
    """Nothing forbidden: every graph is admissible."""
    return ProblemSpec(r, (), (), m)
