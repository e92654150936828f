"""Lower-bound constructions: blow-ups, iterated blow-ups and their exact
limit densities, plus the limit flag-density vectors used to factor
optimal matrices during rounding.

A blow-up replaces each template vertex by a class of vertices and each
template edge (possibly with repeated vertices) by all edges whose class
multiset matches it.  Densities are exact rationals in the part weights.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .enumeration import Flag, TypeGraph, flag_key
from .graphs import (
    DegenerateTemplate,
    GraphError,
    UniformGraph,
    parse_template,
    rational,
)


@dataclass(frozen=True)
class ConstructionTemplate:
    """A template plus part weights describing a (possibly iterated)
    blow-up.  Weights are positive rationals summing to one; iterated
    blow-ups must be balanced and repeat-free."""

    kind: str  # "blowup" | "iterated"
    template: DegenerateTemplate
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if self.kind not in ("blowup", "iterated"):
            raise GraphError(f"unknown construction kind {self.kind!r}")
        weights = tuple(rational(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.template.n:
            raise GraphError("one weight per template vertex required")
        if any(w <= 0 for w in weights) or sum(weights) != 1:
            raise GraphError("weights must be positive and sum to 1")
        if self.kind == "iterated":
            if self.template.is_degenerate:
                raise GraphError("iterated blow-up requires a repeat-free template")
            if len(set(weights)) > 1:
                raise GraphError("iterated blow-up requires balanced weights")


def balanced_blowup(template: DegenerateTemplate, kind: str = "blowup") -> ConstructionTemplate:
    w = Fraction(1, template.n)
    return ConstructionTemplate(kind, template, (w,) * template.n)


def _edge_multiplicity(edge: tuple[int, ...]) -> int:
    mult = factorial(len(edge))
    for v in set(edge):
        mult //= factorial(edge.count(v))
    return mult


def blowup_density(c: ConstructionTemplate) -> Fraction:
    """Limit edge density of the blow-up as part sizes grow proportionally
    to the weights: sum over template edges of multiplicity * weight product."""
    if c.kind != "blowup":
        raise GraphError("blowup_density needs kind='blowup'")
    total = Fraction(0)
    for e in c.template.edges:
        term = Fraction(_edge_multiplicity(e))
        for v in e:
            term *= c.weights[v - 1]
        total += term
    return total


def iterated_blowup_density(template: DegenerateTemplate) -> Fraction:
    """Exact limit density of the balanced iterated blow-up.

    With t parts and e edges, the density d of the balanced limit repeats
    inside each part: d = (r! * e + t * d) / t^r, so d = r! * e / (t^r - t).
    """
    if template.is_degenerate:
        raise GraphError("iterated blow-up requires a repeat-free template")
    t, e, r = template.n, len(template.edges), template.r
    if t < 2:
        raise GraphError("iterated blow-up needs at least 2 template vertices")
    return Fraction(factorial(r) * e, t**r - t)


def construction_density(c: ConstructionTemplate) -> Fraction:
    if c.kind == "blowup":
        return blowup_density(c)
    return iterated_blowup_density(c.template)


def blowup_instance(c: ConstructionTemplate, part_sizes: list[int]) -> UniformGraph:
    """The concrete finite blow-up with the given part sizes (vertices of
    part 1 first, then part 2, ...)."""
    if len(part_sizes) != c.template.n:
        raise GraphError("one size per template vertex required")
    if any(s < 0 for s in part_sizes):
        raise GraphError("part sizes must be nonnegative")
    n = sum(part_sizes)
    if n > 9:
        raise GraphError(f"blow-up instance of order {n} exceeds the cap of 9")
    part = []
    for p, size in enumerate(part_sizes, start=1):
        part.extend([p] * size)
    edge_multisets = {e for e in c.template.edges}
    edges = tuple(
        combo
        for combo in itertools.combinations(range(1, n + 1), c.template.r)
        if tuple(sorted(part[v - 1] for v in combo)) in edge_multisets
    )
    return UniformGraph(c.template.r, n, edges)


def circle_instance(n: int) -> UniformGraph:
    """n points evenly spaced on a circle; a triple is an edge when the
    centre lies strictly inside its triangle, i.e. when every arc gap is
    below half the circle.  Gaps are compared as exact integer multiples
    of 1/n, never with floating point."""
    if n % 2 == 0:
        raise GraphError("even n puts antipodal pairs on a diameter; rejected")
    if not 4 <= n <= 9:
        raise GraphError("circle construction supports 4 <= n <= 9")
    edges = []
    for a, b, c in itertools.combinations(range(n), 3):
        gaps = (b - a, c - b, n - (c - a))
        if all(2 * g < n for g in gaps):
            edges.append((a + 1, b + 1, c + 1))
    return UniformGraph(3, n, tuple(edges))


def tournament_instance(n: int, seed: int) -> UniformGraph:
    """3-graph of cyclically oriented triples of a seeded random tournament."""
    rng = random.Random(seed)
    beats = {}
    for a, b in itertools.combinations(range(1, n + 1), 2):
        beats[(a, b)] = rng.random() < 0.5
    def wins(a, b):
        return beats[(a, b)] if a < b else not beats[(b, a)]
    edges = tuple(
        (a, b, c)
        for a, b, c in itertools.combinations(range(1, n + 1), 3)
        if wins(a, b) == wins(b, c) == wins(c, a)
    )
    return UniformGraph(3, n, edges)


# ---------------------------------------------------------------------------
# named templates


def _t(notation: str, r: int = 3) -> DegenerateTemplate:
    return parse_template(notation, r)


def _complement_template(t: DegenerateTemplate) -> DegenerateTemplate:
    from .graphs import complement

    g = complement(t.as_graph())
    return DegenerateTemplate(g.r, g.n, g.edges)


_FANO = _t("7:124137156235267346457")

TEMPLATES: dict[str, DegenerateTemplate] = {
    # 5-regular on 6 vertices; every link is a 5-cycle.
    "h6": _t("6:123234345145125136356256246146"),
    # 6-regular on 7 vertices; the union of two edge-disjoint Fano planes.
    "h7": _t("7:124137156235267346457356467126245157134237"),
    "k4": _t("4:123124134234"),
    "k5": _t("5:123124125134135145234235245345"),
    "fano": _FANO,
    "complement-fano": _complement_template(_FANO),
    # balanced tripartition with edge types AAB, BBC, CCA and ABC
    "turan": _t("3:112123223133"),
    # complete 4-partite plus the eight two-in-one-part edge types
    "keevash-mubayi": _t("4:112113123124133134144223224234244334"),
    # 6-regular on 7 vertices, links a 4-cycle with two pendant edges
    "construction-6": _t("7:123124125136137146247256257347356357456467"),
    # 6-regular on 7 vertices, links a 4-cycle with a pendant path
    "construction-7": _t("7:123124125136146157237247256345356367457467"),
    # single 3-edge
    "edge": _t("3:123"),
    # complete balanced bipartite 2-graph template
    "bipartite": _t("2:12", r=2),
}


def named_construction(name: str, iterated: bool = False) -> ConstructionTemplate:
    if name not in TEMPLATES:
        raise GraphError(f"unknown construction {name!r}; known: {', '.join(sorted(TEMPLATES))}")
    return balanced_blowup(TEMPLATES[name], "iterated" if iterated else "blowup")


def parse_construction(text: str, r: int = 3) -> ConstructionTemplate:
    """Parse 'blowup <notation> weights p1/q1,...' or a library name,
    optionally prefixed by 'iterated '.  Custom templates use uniformity r."""
    words = text.split()
    if len(words) == 1:
        return named_construction(words[0])
    if len(words) == 2 and words[0] == "iterated":
        return named_construction(words[1], iterated=True)
    if len(words) == 4 and words[0] in ("blowup", "iterated") and words[2] == "weights":
        template = parse_template(words[1], r)
        weights = tuple(rational(w) for w in words[3].split(","))
        return ConstructionTemplate(words[0], template, weights)
    if len(words) == 2 and words[0] in ("blowup", "iterated"):
        return balanced_blowup(parse_template(words[1], r), words[0])
    raise GraphError(f"cannot parse construction {text!r}")


# ---------------------------------------------------------------------------
# limit flag densities
#
# In a large blow-up, the joint distribution of induced flags around a
# fixed placement of the type's labelled vertices converges; for each
# placement class the vector of limit flag densities is an exact
# polynomial in the part weights.  These vectors span the zero eigenspace
# of an optimal matrix when the construction is extremal.


class _PartSystem:
    """Parts with weights and an edge rule on part multisets."""

    def __init__(self, r, weights, edge_rule):
        self.r = r
        self.weights = tuple(weights)
        self.edge_rule = edge_rule

    def count(self):
        return len(self.weights)


def _blowup_system(c: ConstructionTemplate) -> _PartSystem:
    edges = set(c.template.edges)
    return _PartSystem(c.template.r, c.weights, lambda ms: ms in edges)


def _iterated_system(c: ConstructionTemplate, depth: int) -> _PartSystem:
    """Flatten levels 1..depth of a balanced iterated blow-up into t^depth
    parts; edges below the cut-off depth are dropped (truncation)."""
    t = c.template.n
    edges = set(c.template.edges)
    positions = list(itertools.product(range(1, t + 1), repeat=depth))
    weight = Fraction(1, t**depth)

    def rule(ms):
        a, b, c_ = (positions[i - 1] for i in ms)
        if a == b or b == c_ or a == c_:
            return False
        for la, lb, lc in zip(a, b, c_):
            if la == lb == lc:
                continue
            return len({la, lb, lc}) == 3 and tuple(sorted((la, lb, lc))) in edges
        return False

    return _PartSystem(c.template.r, (weight,) * len(positions), rule)


def limit_flag_density_vectors(
    type_graph: TypeGraph, flags: list[Flag], c: ConstructionTemplate, depth: int = 2
) -> list[tuple[Fraction, ...]]:
    """One vector per equivalence class of placements of the type's
    labelled vertices into construction parts; component F is the exact
    limit probability that a random extension induces the flag F.

    Placements that do not induce the type in the limit are skipped; the
    empty list is legal output.  For iterated blow-ups, placements are
    enumerated to a finite level `depth` (deeper placements contribute
    vectors inside the span at these problem sizes); the enumeration is
    exponential in depth and the number of labels.
    """
    s = type_graph.order
    orders = {f.order for f in flags}
    if flags and len(orders) != 1:
        raise GraphError("flags of mixed order")
    l = orders.pop() if flags else s
    free = l - s
    r = type_graph.graph.r if s else (flags[0].graph.r if flags else 3)

    system = _blowup_system(c) if c.kind == "blowup" else _iterated_system(c, depth)
    t = system.count()
    keys = {flag_key(f.graph, s): i for i, f in enumerate(flags)}
    type_edges = set(type_graph.graph.edges)

    vectors: list[tuple[Fraction, ...]] = []
    seen = set()
    for placement in itertools.product(range(1, t + 1), repeat=s):
        if not _placement_induces_type(placement, type_edges, system, r, s):
            continue
        vec = [Fraction(0)] * len(flags)
        for ext in itertools.product(range(1, t + 1), repeat=free):
            prob = Fraction(1)
            for p in ext:
                prob *= system.weights[p - 1]
            parts = placement + ext
            edges = tuple(
                tuple(i + 1 for i in sub)
                for sub in itertools.combinations(range(l), r)
                if system.edge_rule(tuple(sorted(parts[i] for i in sub)))
            )
            key = flag_key(UniformGraph(r, l, edges), s)
            i = keys.get(key)
            if i is not None:
                vec[i] += prob
        tup = tuple(vec)
        if tup not in seen:
            seen.add(tup)
            vectors.append(tup)
    return vectors


def _placement_induces_type(placement, type_edges, system, r, s) -> bool:
    induced = {
        tuple(i + 1 for i in sub)
        for sub in itertools.combinations(range(s), r)
        if system.edge_rule(tuple(sorted(placement[i] for i in sub)))
    }
    return induced == type_edges
