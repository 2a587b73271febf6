import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from motsheaf.quiver import (
    CyclicQuiver,
    PathCombination,
    Quiver,
    UnknownVertex,
    enumerate_paths,
    hom_space,
    obj,
    unroll_loops,
)


@st.composite
def quivers(draw, acyclic=True):
    n = draw(st.integers(1, 5))
    vs = [f"v{i}" for i in range(n)]
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    raw = draw(st.lists(pairs, max_size=8))
    edges = []
    for k, (i, j) in enumerate(raw):
        if acyclic and i >= j:
            continue
        edges.append((f"e{k}", vs[i], vs[j]))
    return Quiver.build(vs, edges)


def _nx(q: Quiver):
    g = nx.MultiDiGraph()
    g.add_nodes_from(q.vertices)
    for e in q.edges:
        g.add_edge(e.source, e.target, key=e.label)
    return g


def test_unknown_vertex_rejected():
    with pytest.raises(UnknownVertex):
        Quiver.build(["a"], [("e", "a", "b")])


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        Quiver.build(["a", "b"], [("e", "a", "b"), ("e", "b", "a")])


def test_paths_need_acyclic_quiver():
    q = Quiver.build(["a"], [("l", "a", "a")])
    with pytest.raises(CyclicQuiver):
        enumerate_paths(q, "a", "a")


def test_two_paths_in_a_square():
    q = Quiver.build("abcd", [("x", "a", "b"), ("y", "b", "d"), ("z", "a", "c"), ("w", "c", "d")])
    assert enumerate_paths(q, "a", "d") == (("x", "y"), ("z", "w"))
    assert enumerate_paths(q, "a", "a") == ((),)


@settings(max_examples=60, deadline=None)
@given(quivers())
def test_path_count_matches_networkx(q):
    g = _nx(q)
    for u in q.vertices:
        for v in q.vertices:
            ref = 1 if u == v else len(list(nx.all_simple_edge_paths(g, u, v)))
            assert len(enumerate_paths(q, u, v)) == ref


@settings(max_examples=60, deadline=None)
@given(quivers())
def test_hom_rank_is_path_count(q):
    a = obj(*q.vertices[:2])
    b = obj(*q.vertices[-2:])
    h = hom_space(q, a, b)
    assert h.rank == sum(len(enumerate_paths(q, s, t)) for s in a.vertices for t in b.vertices)
    coords = list(range(1, h.rank + 1))
    assert h.coordinates(h.element(coords)) == coords


@settings(max_examples=60, deadline=None)
@given(quivers(acyclic=False), st.integers(1, 3))
def test_unrolling_is_acyclic_and_incidence_preserving(q, depth):
    u, proj = unroll_loops(q, depth)
    assert u.acyclic
    for e in u.edges:
        base = q.edge(proj.emap[e.label])
        assert proj(e.source) == base.source and proj(e.target) == base.target


def test_loop_lifts_to_depth():
    q = Quiver.build(["a"], [("l", "a", "a")])
    u, proj = unroll_loops(q, 3)
    assert len(u.vertices) == 4
    assert len(enumerate_paths(u, ("a", 0), ("a", 3))) == 1


def test_path_combination_arithmetic():
    q = Quiver.build("abc", [("f", "a", "b"), ("g", "b", "c")])
    f = PathCombination.edge(q, "f", 2)
    g = PathCombination.edge(q, "g", 3)
    fg = f.then(g)
    assert fg.terms == ((("f", "g"), 6),)
    assert (fg - fg).is_zero()
    assert PathCombination.identity("a").then(f) == f
