"""Small r-uniform hypergraphs: parsing, canonical labelling, containment.

Vertices are the integers 1..n with n <= 9, so every graph has a compact
textual form ``"n:"`` followed by the concatenated edges, each edge a block
of r digits (``"4:123124134"`` is a 3-graph on four vertices with three
edges).  All values are immutable and all operations are pure functions,
so everything here is safe to share between threads.

Canonical forms are computed by exhaustive minimisation of the sorted edge
list over all vertex permutations; two graphs receive the same key exactly
when they are isomorphic.  For n <= 8 the search is vectorised with numpy,
for n = 9 it runs in chunks with a two-limb encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

MAX_VERTICES = 9


class GraphError(ValueError):
    """Malformed graph, notation or template."""


def _check_uniformity(r: int) -> None:
    if r not in (2, 3):
        raise GraphError(f"uniformity must be 2 or 3, got {r!r}")


def _check_order(n: int) -> None:
    if not isinstance(n, int) or n < 0 or n > MAX_VERTICES:
        raise GraphError(f"order must be an integer in 0..{MAX_VERTICES}, got {n!r}")


@dataclass(frozen=True)
class UniformGraph:
    """An r-uniform hypergraph on vertex set {1..n}.

    ``edges`` is a sorted tuple of sorted r-tuples of distinct vertices;
    any iterable of edges is normalised on construction.
    """

    r: int
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _check_uniformity(self.r)
        _check_order(self.n)
        seen = set()
        norm = []
        for edge in self.edges:
            e = tuple(sorted(edge))
            if len(e) != self.r:
                raise GraphError(f"edge {edge!r} does not have {self.r} vertices")
            if len(set(e)) != self.r:
                raise GraphError(f"repeated vertex within edge {edge!r}")
            if e[0] < 1 or e[-1] > self.n:
                raise GraphError(f"vertex out of range in edge {edge!r}")
            if e in seen:
                raise GraphError(f"duplicate edge {edge!r}")
            seen.add(e)
            norm.append(e)
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def edge_set(self) -> frozenset:
        return _edge_set(self)

    def notation(self) -> str:
        return f"{self.n}:" + "".join("".join(map(str, e)) for e in self.edges)

    def __str__(self) -> str:
        return self.notation()


@lru_cache(maxsize=None)
def _edge_set(g: UniformGraph) -> frozenset:
    return frozenset(g.edges)


@dataclass(frozen=True)
class DegenerateTemplate:
    """A blow-up template: like a graph, but edges are r-multisets.

    Repeated vertices inside an edge ("112") encode edges that live inside
    a single part, or across two parts, of the blow-up.  An edge with all
    entries equal ("333") is only meaningful for r = 3.
    """

    r: int
    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        _check_uniformity(self.r)
        _check_order(self.n)
        seen = set()
        norm = []
        for edge in self.edges:
            e = tuple(sorted(edge))
            if len(e) != self.r:
                raise GraphError(f"edge {edge!r} does not have {self.r} entries")
            if any(v < 1 or v > self.n for v in e):
                raise GraphError(f"vertex out of range in edge {edge!r}")
            if len(set(e)) == 1 and self.r != 3:
                raise GraphError(f"all-equal edge {edge!r} requires uniformity 3")
            if e in seen:
                raise GraphError(f"duplicate edge {edge!r}")
            seen.add(e)
            norm.append(e)
        norm.sort()
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def is_degenerate(self) -> bool:
        return any(len(set(e)) < self.r for e in self.edges)

    def as_graph(self) -> UniformGraph:
        """View a repeat-free template as a plain graph."""
        if self.is_degenerate:
            raise GraphError("template has degenerate edges")
        return UniformGraph(self.r, self.n, self.edges)

    def notation(self) -> str:
        return f"{self.n}:" + "".join("".join(map(str, e)) for e in self.edges)

    def __str__(self) -> str:
        return self.notation()


@dataclass(frozen=True)
class CanonicalForm:
    """Permutation-invariant key: the minimal notation over all relabellings."""

    key: bytes

    @property
    def text(self) -> str:
        return self.key.decode("ascii")


# ---------------------------------------------------------------------------
# parsing


def _parse_edge_blocks(notation: str, r: int) -> tuple[int, list[tuple[int, ...]]]:
    _check_uniformity(r)
    if not isinstance(notation, str) or ":" not in notation:
        raise GraphError(f"malformed notation {notation!r}: expected '<n>:<edges>'")
    head, _, body = notation.partition(":")
    if not head.isdigit() or len(head) != 1:
        raise GraphError(f"malformed order in notation {notation!r}")
    n = int(head)
    _check_order(n)
    if not body.isdigit() and body != "":
        raise GraphError(f"non-digit characters in edge list of {notation!r}")
    if len(body) % r != 0:
        raise GraphError(f"edge list length of {notation!r} is not a multiple of {r}")
    digits = [int(c) for c in body]
    if any(d < 1 or d > n for d in digits):
        raise GraphError(f"vertex out of range 1..{n} in {notation!r}")
    edges = [tuple(digits[i : i + r]) for i in range(0, len(digits), r)]
    return n, edges


def parse_graph(notation: str, r: int) -> UniformGraph:
    """Parse ``"n:e1e2..."`` into a graph; degenerate edges are rejected."""
    n, edges = _parse_edge_blocks(notation, r)
    return UniformGraph(r, n, tuple(edges))


def parse_template(notation: str, r: int) -> DegenerateTemplate:
    """Parse a template in the same notation, allowing repeated vertices."""
    n, edges = _parse_edge_blocks(notation, r)
    return DegenerateTemplate(r, n, tuple(edges))


# ---------------------------------------------------------------------------
# canonical forms
#
# A graph is encoded as the set of lexicographic ranks of its edges among
# all r-subsets of {1..n}.  For a fixed edge count, the lexicographically
# smallest sorted edge list corresponds to the rank set whose indicator
# word (rank 0 first) is largest, so minimising the notation over all
# permutations is an argmax over permutation images.


@lru_cache(maxsize=None)
def _subsets(n: int, r: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), r))


@lru_cache(maxsize=None)
def _rank_lut(n: int, r: int) -> np.ndarray:
    lut = np.zeros((n,) * r, dtype=np.int64)
    for i, s in enumerate(_subsets(n, r)):
        lut[s] = i
    return lut


@lru_cache(maxsize=None)
def _perm_array(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


def _image_ranks(perms: np.ndarray, n: int, r: int) -> np.ndarray:
    """Rank of the image of every r-subset under every permutation."""
    subs = np.array(_subsets(n, r), dtype=np.int64)
    img = perms[:, subs].astype(np.int64)
    img.sort(axis=2)
    lut = _rank_lut(n, r)
    if r == 2:
        return lut[img[..., 0], img[..., 1]]
    return lut[img[..., 0], img[..., 1], img[..., 2]]


@lru_cache(maxsize=None)
def _weight_matrix(n: int, r: int) -> np.ndarray:
    """(n!, M) int64 matrix; row p holds 2^(M-1-rank of image) per subset."""
    m = comb(n, r)
    ranks = _image_ranks(_perm_array(n), n, r)
    return np.left_shift(np.int64(1), (m - 1 - ranks).astype(np.int64))


def _best_perm_small(n: int, r: int, edge_ranks: list[int]) -> np.ndarray:
    w = _weight_matrix(n, r)
    values = w[:, edge_ranks].sum(axis=1)
    return _perm_array(n)[int(np.argmax(values))]


def _best_perm_chunked(n: int, r: int, edge_ranks: list[int]) -> np.ndarray:
    # n = 9, r = 3: 84 subsets exceed an int64 word, so compare two limbs.
    m = comb(n, r)
    split = 42
    perms = _perm_array(n)
    best = None
    best_val = (-1, -1)
    for start in range(0, len(perms), 8192):
        chunk = perms[start : start + 8192]
        exps = m - 1 - _image_ranks(chunk, n, r)[:, edge_ranks]
        hi = np.where(exps >= split, np.left_shift(np.int64(1), np.maximum(exps - split, 0)), 0).sum(axis=1)
        lo = np.where(exps < split, np.left_shift(np.int64(1), np.minimum(exps, split - 1)), 0).sum(axis=1)
        i = int(np.lexsort((lo, hi))[-1])
        val = (int(hi[i]), int(lo[i]))
        if val > best_val:
            best_val = val
            best = chunk[i]
    return best


@lru_cache(maxsize=None)
def _canonical_edges(g: UniformGraph) -> tuple[tuple[int, ...], ...]:
    if not g.edges or g.n <= g.r:
        return g.edges
    rank = {s: i for i, s in enumerate(_subsets(g.n, g.r))}
    edge_ranks = [rank[tuple(v - 1 for v in e)] for e in g.edges]
    if comb(g.n, g.r) <= 62:
        perm = _best_perm_small(g.n, g.r, edge_ranks)
    else:
        perm = _best_perm_chunked(g.n, g.r, edge_ranks)
    image = sorted(tuple(sorted(int(perm[v - 1]) + 1 for v in e)) for e in g.edges)
    return tuple(image)


def canonical_graph(g: UniformGraph) -> UniformGraph:
    """The minimal representative of g's isomorphism class."""
    return UniformGraph(g.r, g.n, _canonical_edges(g))


def canonical_key(g: UniformGraph) -> str:
    return canonical_graph(g).notation()


def canonical_form(g: UniformGraph) -> CanonicalForm:
    """Key equal for two graphs exactly when they are isomorphic."""
    return CanonicalForm(canonical_key(g).encode("ascii"))


def canonical_value(r: int, n: int, edge_ranks: list[int]) -> tuple[int, ...]:
    """Isomorphism-invariant integer key for a graph given by edge ranks.

    Used by the enumerator to deduplicate large candidate batches without
    reconstructing edge lists.
    """
    if not edge_ranks or n <= r:
        return (0, *sorted(edge_ranks))
    m = comb(n, r)
    if m <= 62:
        w = _weight_matrix(n, r)
        return (int(w[:, edge_ranks].sum(axis=1).max()),)
    perm = _best_perm_chunked(n, r, edge_ranks)
    lut = _rank_lut(n, r)
    subs = _subsets(n, r)
    image = sorted(int(lut[tuple(sorted(perm[v] for v in subs[i]))]) for i in edge_ranks)
    return tuple(image)


# ---------------------------------------------------------------------------
# elementary operations


def permute(g: UniformGraph, perm: tuple[int, ...]) -> UniformGraph:
    """Relabel vertex i as perm[i-1]; perm must list 1..n in some order."""
    if sorted(perm) != list(range(1, g.n + 1)):
        raise GraphError(f"{perm!r} is not a permutation of 1..{g.n}")
    return UniformGraph(g.r, g.n, tuple(tuple(perm[v - 1] for v in e) for e in g.edges))


def induced_subgraph(g: UniformGraph, vertices) -> UniformGraph:
    """Subgraph induced on the given vertices, relabelled 1..k in order."""
    vs = list(vertices)
    if len(set(vs)) != len(vs) or any(v < 1 or v > g.n for v in vs):
        raise GraphError(f"invalid vertex selection {vertices!r}")
    pos = {v: i + 1 for i, v in enumerate(vs)}
    sel = set(vs)
    edges = tuple(
        tuple(pos[v] for v in e) for e in g.edges if all(v in sel for v in e)
    )
    return UniformGraph(g.r, len(vs), edges)


def complement(g: UniformGraph) -> UniformGraph:
    """Same vertices; edge set complemented within all r-subsets."""
    present = g.edge_set
    edges = tuple(
        tuple(v + 1 for v in s)
        for s in _subsets(g.n, g.r)
        if tuple(v + 1 for v in s) not in present
    )
    return UniformGraph(g.r, g.n, edges)


def link_graph(g: UniformGraph, x: int) -> UniformGraph:
    """The 2-graph of pairs completing a 3-edge with x, on the other vertices."""
    if g.r != 3:
        raise GraphError("link graphs are defined for 3-graphs")
    if x < 1 or x > g.n:
        raise GraphError(f"vertex {x} out of range 1..{g.n}")
    rest = [v for v in range(1, g.n + 1) if v != x]
    pos = {v: i + 1 for i, v in enumerate(rest)}
    edges = tuple(
        tuple(sorted(pos[v] for v in e if v != x)) for e in g.edges if x in e
    )
    return UniformGraph(2, g.n - 1, edges)


def degrees(g: UniformGraph) -> tuple[int, ...]:
    d = [0] * g.n
    for e in g.edges:
        for v in e:
            d[v - 1] += 1
    return tuple(d)


# ---------------------------------------------------------------------------
# containment


def contains_subgraph(g: UniformGraph, h: UniformGraph) -> bool:
    """True iff some injection V(h) -> V(g) maps every edge of h to an edge of g."""
    if g.r != h.r:
        raise GraphError("uniformity mismatch")
    if h.n > g.n or len(h.edges) > len(g.edges):
        return False
    if not h.edges:
        return True
    g_edges = g.edge_set

    # Place high-degree vertices of h first so edge checks prune early.
    h_deg = degrees(h)
    order = sorted(range(1, h.n + 1), key=lambda v: -h_deg[v - 1])
    # Edges of h checkable once the first t vertices of `order` are placed.
    placed_after = [[] for _ in range(h.n + 1)]
    rank_of = {v: i for i, v in enumerate(order)}
    for e in h.edges:
        placed_after[max(rank_of[v] for v in e) + 1].append(e)

    assignment = {}
    used = [False] * (g.n + 1)

    def extend(t: int) -> bool:
        if t == len(order):
            return True
        v = order[t]
        for w in range(1, g.n + 1):
            if used[w]:
                continue
            assignment[v] = w
            used[w] = True
            ok = all(
                tuple(sorted(assignment[u] for u in e)) in g_edges
                for e in placed_after[t + 1]
            )
            if ok and extend(t + 1):
                return True
            used[w] = False
            del assignment[v]
        return False

    return extend(0)


def contains_induced(g: UniformGraph, h: UniformGraph) -> bool:
    """True iff some |V(h)|-subset of V(g) induces a graph isomorphic to h."""
    if g.r != h.r:
        raise GraphError("uniformity mismatch")
    if h.n > g.n:
        return False
    h_key = canonical_key(h)
    h_edges = len(h.edges)
    for sub in itertools.combinations(range(1, g.n + 1), h.n):
        ind = induced_subgraph(g, sub)
        if len(ind.edges) == h_edges and canonical_key(ind) == h_key:
            return True
    return False


def rational(value) -> Fraction:
    """Parse an exact rational from an int, Fraction or 'p/q' string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"not a rational: {value!r}") from exc
    raise GraphError(f"not a rational: {value!r}")


def format_rational(x: Fraction) -> "int | str":
    """Integers stay integers, everything else renders as 'p/q'."""
    x = Fraction(x)
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def injections(n: int, k: int):
    """All ordered k-tuples of distinct elements of 1..n."""
    return itertools.permutations(range(1, n + 1), k)


def falling(n: int, k: int) -> int:
    return factorial(n) // factorial(n - k) if k <= n else 0
