"""Exact densities: subgraph, edge and flag-pair tables."""

import itertools
import random
from fractions import Fraction
from math import comb, factorial

import pytest

from flagbound.densities import (
    averaging_check,
    build_density_table,
    edge_density,
    flag_pair_density_table,
    induced_profile,
    subgraph_density,
    table_lines,
    type_density,
)
from flagbound.enumeration import (
    ProblemSpec,
    admissible_graphs,
    enumerate_flags,
    enumerate_types,
    unrestricted_spec,
)
from flagbound.graphs import GraphError, UniformGraph, parse_graph

TRIANGLE = parse_graph("3:121323", 2)
MANTEL = ProblemSpec(2, (TRIANGLE,), (), 3)
MANTEL_TYPE = enumerate_types(MANTEL)[0]
MANTEL_FLAGS = enumerate_flags(MANTEL_TYPE, 2, MANTEL)
H7 = parse_graph("7:124137156235267346457356467126245157134237", 3)


def random_graph(rng, n, r=3, p=0.5):
    edges = [e for e in itertools.combinations(range(1, n + 1), r) if rng.random() < p]
    return UniformGraph(r, n, tuple(edges))


def test_density_of_self():
    rng = random.Random(0)
    for _ in range(20):
        g = random_graph(rng, rng.randint(3, 6))
        assert subgraph_density(g, g) == 1


def test_k33_densities():
    k33 = UniformGraph(2, 6, tuple((a, b) for a in (1, 2, 3) for b in (4, 5, 6)))
    assert subgraph_density(parse_graph("3:1213", 2), k33) == Fraction(9, 10)
    assert subgraph_density(parse_graph("3:", 2), k33) == Fraction(1, 10)


def test_profile_partitions_unity():
    rng = random.Random(1)
    for _ in range(5):
        g = random_graph(rng, 6)
        profile = induced_profile(g, 6 if g.n == 6 else g.n)
        total = sum(
            subgraph_density(parse_graph(key, 3), g) for key in profile
        )
        assert total == 1


def test_edge_densities():
    assert [edge_density(g) for g in admissible_graphs(MANTEL, 3)] == [
        Fraction(0),
        Fraction(1, 3),
        Fraction(2, 3),
    ]
    assert edge_density(parse_graph("4:123124134234", 3)) == 1
    assert edge_density(H7) == Fraction(2, 5)


def test_edge_density_too_small():
    with pytest.raises(GraphError):
        edge_density(UniformGraph(3, 2, ()))


def test_mantel_table_exact():
    rows = {}
    for h in admissible_graphs(MANTEL, 3):
        rows[h.notation()] = flag_pair_density_table(MANTEL_TYPE, MANTEL_FLAGS, h)
    third = Fraction(1, 3)
    assert rows["3:"] == ((1, 0), (0, 0))
    assert rows["3:12"] == ((third, third), (third, 0))
    assert rows["3:1213"] == ((0, third), (third, third))


def test_complement_duality_two_graphs():
    # d_{F_e,F_n}(H2) = d_{F_{1-e},F_{1-n}}(H1)
    h1 = parse_graph("3:12", 2)
    h2 = parse_graph("3:1213", 2)
    t1 = flag_pair_density_table(MANTEL_TYPE, MANTEL_FLAGS, h1)
    t2 = flag_pair_density_table(MANTEL_TYPE, MANTEL_FLAGS, h2)
    for a in range(2):
        for b in range(2):
            assert t2[a][b] == t1[1 - a][1 - b]


def _type_probability_oracle(type_graph, h):
    """Independent: count injections inducing the type, over all injections."""
    s = type_graph.order
    want = set(type_graph.graph.edges)
    h_edges = set(h.edges)
    hits = total = 0
    for theta in itertools.permutations(range(1, h.n + 1), s):
        total += 1
        induced = {
            tuple(sorted(i + 1 for i in sub))
            for sub in itertools.combinations(range(s), 3)
            if tuple(sorted(theta[i] for i in sub)) in h_edges
        }
        if induced == want:
            hits += 1
    return Fraction(hits, total) if total else Fraction(1)


def test_table_sums_to_type_probability():
    rng = random.Random(2)
    spec = unrestricted_spec(3, 5)
    types = enumerate_types(spec)
    for _ in range(4):
        g = random_graph(rng, rng.randint(5, 6))
        for t in types:
            flags = enumerate_flags(t, (5 + t.order) // 2, spec)
            table = flag_pair_density_table(t, flags, g)
            total = sum(sum(row) for row in table)
            assert total == _type_probability_oracle(t, g)
            assert total == type_density(t, g)


def test_table_symmetry_and_range():
    rng = random.Random(4)
    spec = unrestricted_spec(3, 5)
    for t in enumerate_types(spec):
        flags = enumerate_flags(t, (5 + t.order) // 2, spec)
        g = random_graph(rng, 6)
        table = flag_pair_density_table(t, flags, g)
        k = len(flags)
        for a in range(k):
            for b in range(k):
                assert table[a][b] == table[b][a]
                assert 0 <= table[a][b] <= 1


def test_marginal_consistency():
    # sum over F' of d_{F,F'}(H) equals the probability of F on S1 alone
    spec = unrestricted_spec(3, 5)
    t = [x for x in enumerate_types(spec) if x.order == 1][0]
    flags = enumerate_flags(t, 3, spec)
    rng = random.Random(8)
    from flagbound.enumeration import flag_key
    from flagbound.densities import _extension_key, _induces_type

    for _ in range(4):
        h = random_graph(rng, 5)
        table = flag_pair_density_table(t, flags, h)
        h_edges = h.edge_set
        index = {flag_key(f.graph, 1): i for i, f in enumerate(flags)}
        counts = [0] * len(flags)
        total = 0
        for theta in itertools.permutations(range(1, 6), 1):
            rest = [v for v in range(1, 6) if v not in theta]
            for s1 in itertools.combinations(rest, 2):
                total += 1
                if _induces_type(h_edges, theta, t):
                    i = index.get(_extension_key(h_edges, theta, s1, 3, 1))
                    if i is not None:
                        counts[i] += 1
        for i in range(len(flags)):
            assert sum(table[i]) == Fraction(counts[i], total)


def test_averaging_identity_examples():
    c5 = parse_graph("5:1223344515", 2)
    assert averaging_check(MANTEL_TYPE, MANTEL_FLAGS, c5, 3)
    # collapse case: graph of order m
    h = parse_graph("3:1213", 2)
    assert averaging_check(MANTEL_TYPE, MANTEL_FLAGS, h, 3)
    # 3-uniform case anchored on the 5-regular graph on six vertices
    h6 = parse_graph("6:123234345145125136356256246146", 3)
    spec = unrestricted_spec(3, 5)
    t1 = [t for t in enumerate_types(spec) if t.order == 1][0]
    flags = enumerate_flags(t1, 3, spec)
    assert averaging_check(t1, flags, h6, 5)


def test_finite_partition_identity_small():
    # d(G) equals the profile-weighted edge densities at every order
    rng = random.Random(11)
    for _ in range(10):
        g = random_graph(rng, rng.randint(4, 7))
        for m in range(3, g.n + 1):
            total = Fraction(0)
            for key, count in induced_profile(g, m).items():
                h = parse_graph(key, 3)
                total += Fraction(count, comb(g.n, m)) * edge_density(h)
            assert total == edge_density(g)


def test_isomorphism_invariance():
    from flagbound.graphs import permute

    rng = random.Random(12)
    for _ in range(10):
        g = random_graph(rng, 6)
        perm = list(range(1, 7))
        rng.shuffle(perm)
        h = permute(g, tuple(perm))
        assert edge_density(g) == edge_density(h)
        assert subgraph_density(parse_graph("4:123", 3), g) == subgraph_density(
            parse_graph("4:123", 3), h
        )


def test_table_export_lines():
    graphs = admissible_graphs(MANTEL, 3)
    table = build_density_table(MANTEL_TYPE, MANTEL_FLAGS, graphs)
    lines = list(table_lines(table, graphs))
    assert len(lines) == 3 * 4
    assert lines[0] == "3: 2:(1) 2:(1) 1"
    assert "3:12 2:(1) 2:12(1) 1/3" in lines
