"""Blow-up constructions, their exact densities and limit flag vectors."""

import itertools
import math
from fractions import Fraction

import pytest

from flagbound.constructions import (
    ConstructionTemplate,
    TEMPLATES,
    balanced_blowup,
    blowup_density,
    blowup_instance,
    circle_instance,
    construction_density,
    iterated_blowup_density,
    limit_flag_density_vectors,
    named_construction,
    parse_construction,
    tournament_instance,
)
from flagbound.densities import edge_density
from flagbound.enumeration import ProblemSpec, enumerate_flags, enumerate_types, unrestricted_spec
from flagbound.graphs import (
    GraphError,
    canonical_key,
    contains_subgraph,
    parse_graph,
    parse_template,
)

K4_MINUS = parse_graph("4:123124134", 3)
F32 = parse_graph("5:123124125345", 3)
C5 = parse_graph("5:123234345145125", 3)
J4 = parse_graph("5:125135145235245345", 3)


@pytest.mark.parametrize(
    "name,value",
    [
        ("h7", Fraction(12, 49)),
        ("h6", Fraction(5, 18)),
        ("k4", Fraction(3, 8)),
        ("turan", Fraction(5, 9)),
        ("keevash-mubayi", Fraction(3, 4)),
        ("bipartite", Fraction(1, 2)),
    ],
)
def test_blowup_densities(name, value):
    assert blowup_density(named_construction(name)) == value


@pytest.mark.parametrize(
    "name,value",
    [
        ("edge", Fraction(1, 4)),
        ("h6", Fraction(2, 7)),
        ("complement-fano", Fraction(1, 2)),
        ("h7", Fraction(1, 4)),
    ],
)
def test_iterated_densities(name, value):
    assert iterated_blowup_density(TEMPLATES[name]) == value


def test_one_way_bipartite_density():
    c = ConstructionTemplate(
        "blowup", parse_template("2:112", 3), (Fraction(2, 3), Fraction(1, 3))
    )
    assert blowup_density(c) == Fraction(4, 9)


def test_iterated_requires_plain_template():
    with pytest.raises(GraphError):
        iterated_blowup_density(TEMPLATES["turan"])
    with pytest.raises(GraphError):
        ConstructionTemplate("iterated", TEMPLATES["turan"], (Fraction(1, 3),) * 3)


def test_iteration_strictly_beats_single_blowup():
    for name, t in TEMPLATES.items():
        if t.is_degenerate or not t.edges or t.r != 3:
            continue
        assert iterated_blowup_density(t) > blowup_density(balanced_blowup(t))


def test_weights_validated():
    with pytest.raises(GraphError):
        ConstructionTemplate("blowup", TEMPLATES["k4"], (Fraction(1, 2),) * 4)
    with pytest.raises(GraphError):
        ConstructionTemplate("blowup", TEMPLATES["k4"], (Fraction(1, 2),) * 2)


def test_blowup_instance_k4():
    inst = blowup_instance(named_construction("k4"), [2, 2, 2, 2])
    assert inst.n == 8 and len(inst.edges) == 32


def test_blowup_instance_identity():
    inst = blowup_instance(named_construction("edge"), [1, 1, 1])
    assert inst.notation() == "3:123"


def test_blowup_instance_degenerate_needs_two():
    inst = blowup_instance(named_construction("turan"), [1, 1, 1])
    assert inst.notation() == "3:123"


def test_blowup_instance_cap():
    with pytest.raises(GraphError):
        blowup_instance(named_construction("k4"), [3, 3, 3, 3])


def test_instance_density_approaches_limit():
    c = named_construction("k4")
    limit = blowup_density(c)
    inst = blowup_instance(c, [2, 2, 2, 2])
    assert abs(edge_density(inst) - limit) <= Fraction(1, 8)
    # exact finite count: 32 transversal triples out of C(8,3)
    assert edge_density(inst) == Fraction(32, 56)


def test_freeness_transfer():
    h7 = blowup_instance(named_construction("h7"), [2, 1, 1, 1, 1, 1, 1])
    for forb in (K4_MINUS, C5, F32):
        assert not contains_subgraph(h7, forb)
    h6 = blowup_instance(named_construction("h6"), [2, 2, 1, 1, 1, 1])
    for forb in (K4_MINUS, F32):
        assert not contains_subgraph(h6, forb)
    k4 = blowup_instance(named_construction("k4"), [2, 2, 2, 2])
    for forb in (J4, F32):
        assert not contains_subgraph(k4, forb)


def test_circle_instance_is_c5():
    assert canonical_key(circle_instance(5)) == canonical_key(C5)


def test_circle_against_floating_geometry():
    # independent oracle: strict point-in-triangle tests with float coordinates
    for n in (5, 7, 9):
        pts = [
            (math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))
            for k in range(n)
        ]

        def inside(a, b, c):
            def cross(p, q):
                return p[0] * q[1] - p[1] * q[0]

            signs = []
            for p, q in ((a, b), (b, c), (c, a)):
                edge = (q[0] - p[0], q[1] - p[1])
                signs.append(cross(edge, (-p[0], -p[1])) > 0)
            return len(set(signs)) == 1

        oracle = {
            (i + 1, j + 1, k + 1)
            for i, j, k in itertools.combinations(range(n), 3)
            if inside(pts[i], pts[j], pts[k])
        }
        assert set(circle_instance(n).edges) == oracle


def test_circle_freeness():
    for n in (5, 7):
        g = circle_instance(n)
        assert not contains_subgraph(g, K4_MINUS)
    assert not contains_subgraph(circle_instance(7), F32)


def test_circle_rejections():
    for n in (4, 6, 8, 3, 11):
        with pytest.raises(GraphError):
            circle_instance(n)


def test_tournament_instance_deterministic():
    a = tournament_instance(7, seed=5)
    b = tournament_instance(7, seed=5)
    assert a == b
    assert tournament_instance(7, seed=6) != a


def test_mantel_limit_vector():
    spec = ProblemSpec(2, (parse_graph("3:121323", 2),), (), 3)
    t = enumerate_types(spec)[0]
    flags = enumerate_flags(t, 2, spec)
    vecs = limit_flag_density_vectors(t, flags, named_construction("bipartite"))
    assert vecs == [(Fraction(1, 2), Fraction(1, 2))]


def test_empty_type_vector_is_plain_flag_densities():
    spec = unrestricted_spec(3, 4)
    t = [x for x in enumerate_types(spec) if x.order == 0][0]
    flags = enumerate_flags(t, 2, spec)
    vecs = limit_flag_density_vectors(t, flags, named_construction("edge"))
    assert len(vecs) == 1  # single class: nothing to place


def test_pair_type_vectors_against_independent_enumeration():
    spec = unrestricted_spec(3, 4)
    t = [x for x in enumerate_types(spec) if x.order == 2][0]
    flags = enumerate_flags(t, 3, spec)
    c = named_construction("k4")
    vecs = limit_flag_density_vectors(t, flags, c)
    # independent computation: place the two labels in same/different parts,
    # extend by one uniform vertex; edge iff three distinct parts
    from flagbound.enumeration import flag_key

    keys = [flag_key(f.graph, 2) for f in flags]
    expected = set()
    for a in range(1, 5):
        for b in range(1, 5):
            probs = {k: Fraction(0) for k in keys}
            for x in range(1, 5):
                parts = (a, b, x)
                edges = (((1, 2, 3),) if len(set(parts)) == 3 else ())
                from flagbound.graphs import UniformGraph

                k = flag_key(UniformGraph(3, 3, edges), 2)
                if k in probs:
                    probs[k] += Fraction(1, 4)
            expected.add(tuple(probs[k] for k in keys))
    assert set(vecs) == expected
    assert len(vecs) == 2  # same part vs different parts


def test_vectors_nonnegative_and_substochastic():
    spec = ProblemSpec(3, (K4_MINUS, F32), (), 6)
    blowup = named_construction("h6")
    for t in enumerate_types(spec):
        flags = enumerate_flags(t, (6 + t.order) // 2, spec)
        for vec in limit_flag_density_vectors(t, flags, blowup):
            assert all(x >= 0 for x in vec)
            assert sum(vec) <= 1
    # iterated placements are enumerated per level; exponential in the type
    # order, so keep to the small types here
    iterated = named_construction("edge", iterated=True)
    for t in enumerate_types(spec):
        if t.order > 2:
            continue
        flags = enumerate_flags(t, (6 + t.order) // 2, spec)
        for vec in limit_flag_density_vectors(t, flags, iterated):
            assert all(x >= 0 for x in vec)
            assert sum(vec) <= 1


def test_parse_construction_forms():
    assert parse_construction("h7").kind == "blowup"
    assert parse_construction("iterated h6").kind == "iterated"
    custom = parse_construction("blowup 2:112 weights 2/3,1/3", r=3)
    assert blowup_density(custom) == Fraction(4, 9)
    with pytest.raises(GraphError):
        parse_construction("mystery")


def test_construction_density_dispatch():
    assert construction_density(named_construction("h6")) == Fraction(5, 18)
    assert construction_density(named_construction("h6", iterated=True)) == Fraction(2, 7)
