"""Isomorph-free enumeration of admissible graphs, types and flags."""

import itertools

import pytest

from flagbound.enumeration import (
    ProblemSpec,
    admissible_graphs,
    default_flag_order,
    enumerate_flags,
    enumerate_types,
    read_graph_list,
    unrestricted_spec,
    write_graph_list,
)
from flagbound.graphs import (
    GraphError,
    UniformGraph,
    canonical_key,
    contains_induced,
    contains_subgraph,
    induced_subgraph,
    parse_graph,
)

TRIANGLE = parse_graph("3:121323", 2)
K4_MINUS = parse_graph("4:123124134", 3)
F32 = parse_graph("5:123124125345", 3)

MANTEL = ProblemSpec(2, (TRIANGLE,), (), 3)


def brute_force_classes(r, k, admissible):
    """Independent oracle: filter all labelled graphs on k vertices."""
    subsets = list(itertools.combinations(range(1, k + 1), r))
    seen = set()
    for mask in range(1 << len(subsets)):
        g = UniformGraph(r, k, tuple(s for i, s in enumerate(subsets) if mask >> i & 1))
        if admissible(g):
            seen.add(canonical_key(g))
    return seen


def test_unrestricted_counts_small():
    spec = unrestricted_spec(3, 5)
    assert [len(admissible_graphs(spec, k)) for k in range(1, 6)] == [1, 1, 2, 5, 34]


def test_mantel_admissible():
    assert [g.notation() for g in admissible_graphs(MANTEL, 3)] == ["3:", "3:12", "3:1213"]


def test_triangle_free_order_4():
    spec = ProblemSpec(2, (TRIANGLE,), (), 4)
    got = {g.notation() for g in admissible_graphs(spec, 4)}
    oracle = brute_force_classes(2, 4, lambda g: not contains_subgraph(g, TRIANGLE))
    assert got == oracle
    assert len(got) == 7


def test_closure_against_brute_force_3graphs():
    spec = ProblemSpec(3, (K4_MINUS,), (), 5)
    got = {g.notation() for g in admissible_graphs(spec, 5)}
    oracle = brute_force_classes(3, 5, lambda g: not contains_subgraph(g, K4_MINUS))
    assert got == oracle


def test_closure_induced_constraint():
    g1 = parse_graph("4:123", 3)
    spec = ProblemSpec(3, (), (g1,), 5)
    got = {g.notation() for g in admissible_graphs(spec, 5)}
    oracle = brute_force_classes(3, 5, lambda g: not contains_induced(g, g1))
    assert got == oracle


def test_admissible_all_pass_forbidden_checks():
    spec = ProblemSpec(3, (K4_MINUS, F32), (), 6)
    for g in admissible_graphs(spec, 6):
        assert not contains_subgraph(g, K4_MINUS)
        assert not contains_subgraph(g, F32)


def test_monotonicity_in_forbidden_family():
    small = ProblemSpec(3, (K4_MINUS,), (), 5)
    large = ProblemSpec(3, (K4_MINUS, F32), (), 5)
    assert len(admissible_graphs(large, 5)) <= len(admissible_graphs(small, 5))


def test_deterministic_and_sorted():
    twice = [admissible_graphs(ProblemSpec(3, (K4_MINUS,), (), 5), 5) for _ in range(2)]
    assert twice[0] == twice[1]
    notations = [g.notation() for g in twice[0]]
    assert notations == sorted(notations)


def test_types_mantel():
    types = enumerate_types(MANTEL)
    assert [t.notation() for t in types] == ["1:"]


def test_types_m2_only_empty_type():
    types = enumerate_types(ProblemSpec(3, (), (), 2))
    assert len(types) == 1 and types[0].order == 0


def test_types_k4_minus_m5():
    spec = ProblemSpec(3, (K4_MINUS,), (), 5)
    types = enumerate_types(spec)
    orders = sorted({t.order for t in types})
    assert orders == [1, 3]
    # brute-force count of classes per order
    for s in (1, 3):
        oracle = brute_force_classes(3, s, lambda g: not contains_subgraph(g, K4_MINUS))
        assert sum(1 for t in types if t.order == s) == len(oracle)


def test_flags_mantel():
    t = enumerate_types(MANTEL)[0]
    flags = enumerate_flags(t, 2, MANTEL)
    assert [f.notation() for f in flags] == ["2:(1)", "2:12(1)"]


def test_flag_order_equals_type_order():
    t = enumerate_types(MANTEL)[0]
    flags = enumerate_flags(t, 1, MANTEL)
    assert len(flags) == 1 and flags[0].graph == t.graph


def test_flags_pair_type_one_free_vertex():
    spec = unrestricted_spec(3, 4)
    types = [t for t in enumerate_types(spec) if t.order == 2]
    assert len(types) == 1
    flags = enumerate_flags(types[0], 3, spec)
    assert len(flags) == 2  # free vertex completes a 3-edge or not


def test_flag_properties():
    spec = ProblemSpec(3, (K4_MINUS,), (), 5)
    for t in enumerate_types(spec):
        l = default_flag_order(spec, t)
        for f in enumerate_flags(t, l, spec):
            assert f.order == l
            assert induced_subgraph(f.graph, range(1, t.order + 1)).edges == t.graph.edges
            assert not contains_subgraph(f.graph, K4_MINUS)


def test_flag_order_validation():
    t = enumerate_types(MANTEL)[0]
    with pytest.raises(GraphError):
        enumerate_flags(t, 0, MANTEL)


def test_spec_validation():
    with pytest.raises(GraphError):
        ProblemSpec(3, (parse_graph("3:12", 2),), (), 4)  # uniformity mismatch
    with pytest.raises(GraphError):
        ProblemSpec(3, (F32,), (), 4)  # forbidden graph larger than m
    with pytest.raises(GraphError):
        ProblemSpec(3, (), (), 8)  # beyond the supported order


def test_graph_list_round_trip(tmp_path):
    graphs = admissible_graphs(MANTEL, 3)
    path = tmp_path / "graphs.txt"
    write_graph_list(graphs, path)
    assert read_graph_list(path, 2) == graphs
