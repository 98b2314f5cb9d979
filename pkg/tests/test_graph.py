from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from signednet.errors import (
    DisconnectedInput,
    DuplicateEdge,
    ParseError,
    SelfLoopRejected,
    ZeroWeight,
)
from signednet.generators import random_connected, random_tree
from signednet.graph import (
    CutKind,
    GaugePartition,
    Imbalanced,
    SignedGraph,
    classify_negative_cut,
    count_components,
    find_bridges,
    format_edge_list,
    is_connected,
    is_strongly_connected,
    is_weight_balanced,
    load_fixture,
    parse_edge_list,
    split_components,
    strong_components,
    structural_balance,
)


def _components_oracle(n, pairs):
    """Union-find count, independent of the BFS under test."""
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in pairs:
        parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def _bridges_oracle(g):
    """Edges whose single removal raises the component count (O(E^2))."""
    pairs = [(i, j) for i, j, _ in g.edges]
    base = _components_oracle(g.n, pairs)
    return {
        pairs[e] for e in range(len(pairs))
        if _components_oracle(g.n, pairs[:e] + pairs[e + 1:]) > base
    }


@st.composite
def signed_graphs(draw, max_n=12, directed=False):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and (directed or i < j)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    weights = draw(st.lists(st.sampled_from([-2.0, -1.0, 1.0, 2.0]), min_size=len(chosen), max_size=len(chosen)))
    return SignedGraph(n, [(i, j, w) for (i, j), w in zip(chosen, weights)], directed=directed)


# -- parsing ---------------------------------------------------------------


def test_parse_undirected_example():
    g = parse_edge_list("# directed: false\n1 2 -1\n2 3 1")
    assert g.n == 3 and not g.directed
    assert g.edges == ((0, 1, -1.0), (1, 2, 1.0))


def test_parse_directed_fig10():
    g = parse_edge_list("# directed: true\n1 3 -1\n2 1 1\n3 2 1")
    w = g.adjacency()
    a, b, c = (g.index(s) for s in "123")
    assert g.directed
    assert w[a, c] == -1 and w[b, a] == 1 and w[c, b] == 1
    assert np.count_nonzero(w) == 3


def test_parse_rejects_self_loop():
    with pytest.raises(SelfLoopRejected):
        parse_edge_list("1 1 2")


@pytest.mark.parametrize(
    "text, exc",
    [
        ("1 2 1\n2 1 3", DuplicateEdge),
        ("1 2 0", ZeroWeight),
        ("1 2 0.0\n", ZeroWeight),
        ("1 2", ParseError),
        ("1 2 x", ParseError),
        ("# directed: maybe\n1 2 1", ParseError),
        ("", ParseError),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_edge_list(text)


def test_parse_error_reports_line_number():
    with pytest.raises(ParseError) as info:
        parse_edge_list("1 2 1\n# fine\n2 3\n")
    assert info.value.line_no == 3


def test_directed_antiparallel_pair_is_not_duplicate():
    g = parse_edge_list("# directed: true\n1 2 1\n2 1 -1")
    assert len(g.edges) == 2


def test_labels_first_appearance_and_comments():
    g = parse_edge_list("b a 1  # trailing\n# whole line\na c -2.5\n")
    assert g.labels == ("b", "a", "c")
    assert g.edges == ((0, 1, 1.0), (1, 2, -2.5))


def test_nodes_directive_fixes_order_and_isolated_nodes():
    g = parse_edge_list("# nodes: 1 2 3 4\n3 1 1\n")
    assert g.n == 4 and g.labels == ("1", "2", "3", "4")
    assert g.edges == ((0, 2, 1.0),)


@seed(11)
@settings(max_examples=60, deadline=None)
@given(st.one_of(signed_graphs(max_n=8), signed_graphs(max_n=8, directed=True)))
def test_edge_list_round_trip(g):
    if not g.edges:
        return
    back = parse_edge_list(format_edge_list(g))
    assert back.directed == g.directed
    assert np.array_equal(back.adjacency(), g.adjacency())


def test_graph_invariants():
    with pytest.raises(SelfLoopRejected):
        SignedGraph(2, [(0, 0, 1.0)])
    with pytest.raises(ZeroWeight):
        SignedGraph(2, [(0, 1, 0.0)])
    with pytest.raises(DuplicateEdge):
        SignedGraph(2, [(0, 1, 1.0), (1, 0, 2.0)])
    g = SignedGraph(3, [(2, 0, -1.0)])
    assert g.edges == ((0, 2, -1.0),)
    w = g.adjacency()
    assert np.array_equal(w, w.T)


# -- components ------------------------------------------------------------


def test_split_g0_matches_drawing():
    gp, gm = split_components(load_fixture("g0"))
    lab = lambda g: {tuple(sorted((g.label(i), g.label(j)))) for i, j, _ in g.edges}  # noqa: E731
    assert lab(gp) == {("1", "5"), ("2", "6"), ("3", "8"), ("6", "7"), ("2", "7")}
    assert lab(gm) == {("2", "3"), ("1", "6"), ("3", "4")}
    assert gp.n == gm.n == 8


def test_split_trivial_cases():
    pos = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert split_components(pos)[1].edges == ()
    tri = SignedGraph(3, [(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)])
    assert split_components(tri)[0].edges == ()


@seed(12)
@settings(max_examples=80, deadline=None)
@given(signed_graphs(max_n=10))
def test_split_then_merge_reproduces_edges(g):
    gp, gm = split_components(g)
    assert sorted(gp.edges + gm.edges) == sorted(g.edges)


def test_g0_component_counts():
    gp, gm = split_components(load_fixture("g0"))
    assert count_components(gp).count == 4
    assert count_components(gm).count == 5
    assert count_components(SignedGraph(8, [])).count == 8


@seed(13)
@settings(max_examples=80, deadline=None)
@given(signed_graphs(max_n=12))
def test_component_count_matches_union_find(g):
    part = count_components(g)
    assert part.count == _components_oracle(g.n, [(i, j) for i, j, _ in g.edges])
    assert sorted(set(part.assignment)) == list(range(part.count))
    for i, j, _ in g.edges:
        assert part.assignment[i] == part.assignment[j]


def test_strong_components():
    cyc = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, -1.0)], directed=True)
    assert is_strongly_connected(cyc)
    path = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)], directed=True)
    assert strong_components(path).count == 3
    assert is_connected(path) and not is_strongly_connected(path)
    assert is_strongly_connected(load_fixture("g2"))


# -- bridges and negative cuts ----------------------------------------------


def test_bridges_small_cases():
    path = SignedGraph(3, [(0, 1, 1.0), (1, 2, -1.0)])
    assert find_bridges(path) == {(0, 1), (1, 2)}
    tri = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    assert find_bridges(tri) == frozenset()


def test_bridges_g0():
    g = load_fixture("g0")
    bridges = find_bridges(g)
    assert (g.index("3"), g.index("4")) in bridges
    assert (g.index("1"), g.index("5")) in bridges
    assert set(bridges) == _bridges_oracle(g)


@seed(14)
@settings(max_examples=150, deadline=None)
@given(signed_graphs(max_n=12))
def test_bridges_match_brute_force(g):
    assert set(find_bridges(g)) == _bridges_oracle(g)


def test_antiparallel_arcs_are_not_bridges():
    g = SignedGraph(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)], directed=True)
    assert find_bridges(g) == {(1, 2)}


def test_classify_negative_cut_g0():
    g = load_fixture("g0")
    cls = classify_negative_cut(g)
    assert cls.kind is CutKind.CUT_SET_ALL_BRIDGES and cls.size == 3
    assert str(cls) == "CutSetAllBridges(3)"
    named = {tuple(sorted((g.label(i), g.label(j)))) for i, j in cls.cut_set}
    assert named == {("1", "6"), ("2", "3"), ("3", "4")}


def test_classify_negative_cut_other_kinds():
    pos = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert classify_negative_cut(pos).kind is CutKind.NO_NEGATIVE_EDGES
    k6 = SignedGraph(6, [(i, j, -1.0 if (i, j) == (0, 1) else 1.0) for i, j in itertools.combinations(range(6), 2)])
    assert classify_negative_cut(k6).kind is CutKind.NOT_A_CUT_SET
    # two positive triangles joined by two negative edges: a cut, not bridges
    mixed = SignedGraph(
        6,
        [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (0, 3, -1.0), (2, 5, -1.0)],
    )
    cls = classify_negative_cut(mixed)
    assert cls.kind is CutKind.CUT_SET_MIXED and cls.size == 2
    with pytest.raises(DisconnectedInput):
        classify_negative_cut(SignedGraph(3, [(0, 1, -1.0)]))


def test_all_bridges_cut_gives_component_identity(rng):
    """tau(G+) = |C-| + 1 whenever the negative edges are all bridges."""
    hits = 0
    for _ in range(200):
        g = random_connected(rng, int(rng.integers(2, 11)), density=0.2)
        cls = classify_negative_cut(g)
        if cls.kind is CutKind.CUT_SET_ALL_BRIDGES:
            hits += 1
            assert count_components(split_components(g)[0]).count == cls.size + 1
    assert hits >= 10


# -- balance ---------------------------------------------------------------


def _check_gauge(g, part):
    s = part.vector
    w = g.adjacency()
    assert np.all(s[:, None] * w * s[None, :] >= 0)


def test_structural_balance_fixtures():
    g1 = load_fixture("g1")
    part = structural_balance(g1)
    assert isinstance(part, GaugePartition)
    _check_gauge(g1, part)
    side = {g1.label(i) for i in range(8) if part.signs[i] == part.signs[0]}
    assert side == {"1", "2", "5", "6"}
    assert isinstance(structural_balance(load_fixture("g2")), Imbalanced)


def test_imbalanced_triangle_witness():
    tri = SignedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)])
    res = structural_balance(tri)
    assert isinstance(res, Imbalanced)
    assert sorted(res.cycle) == [0, 1, 2]
    assert res.sign_product == -1


@seed(15)
@settings(max_examples=120, deadline=None)
@given(signed_graphs(max_n=10))
def test_balance_result_is_certified(g):
    res = structural_balance(g)
    if isinstance(res, GaugePartition):
        _check_gauge(g, res)
    else:
        assert res.sign_product == -1
        cyc = list(res.cycle) + [res.cycle[0]]
        for (a, b), (i, j, _) in zip(zip(cyc, cyc[1:]), res.edges):
            assert {a, b} == {i, j}


def test_balance_brute_force_small(rng):
    for _ in range(100):
        g = random_connected(rng, int(rng.integers(2, 8)), density=0.5)
        w = g.adjacency()
        exists = any(
            np.all(np.array((1,) + s)[:, None] * w * np.array((1,) + s)[None, :] >= 0)
            for s in itertools.product((1, -1), repeat=g.n - 1)
        )
        assert exists == isinstance(structural_balance(g), GaugePartition)


def test_random_trees_are_balanced(rng):
    for _ in range(100):
        assert isinstance(structural_balance(random_tree(rng, int(rng.integers(1, 12)))), GaugePartition)


def test_weight_balance():
    assert is_weight_balanced(load_fixture("g0"))
    assert is_weight_balanced(load_fixture("fig10"))
    assert not is_weight_balanced(SignedGraph(2, [(0, 1, 2.0), (1, 0, 1.0)], directed=True))
    assert is_weight_balanced(SignedGraph(2, [(0, 1, 2.0), (1, 0, -2.0)], directed=True))


def test_v_minus():
    g1 = load_fixture("g1")
    assert [g1.label(i) for i in g1.v_minus()] == ["2", "3", "6", "7"]
