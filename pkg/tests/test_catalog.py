from __future__ import annotations

import itertools
import random

import pytest

from treecert.catalog import get_entry, problem_names
from treecert.catalog.entry import ParamError
from treecert.catalog.graphs import (
    CycleDraw,
    EncodingError,
    GraphInstance,
    all_graphs,
    cycle_reduction,
    decode_list,
    decode_matrix,
    encode_list,
    encode_matrix,
    k_cycle_subgraph,
    reduction_graphs,
)
from treecert.catalog import reference as ref
from treecert.metrics import path_stats, tree_metrics
from treecert.model import evaluate_path, validate

SMALL = {
    "search": {"n": 4},
    "counting": {"n": 3},
    "threshold": {"n": 4, "k": 2},
    "two_twos": {"n": 4},
    "min": {"n": 3},
    "k_min": {"n": 3, "k": 2},
    "matrix.bfs_tree": {"n": 4},
    "matrix.dfs_tree": {"n": 4},
    "matrix.bipartiteness": {"n": 4},
    "matrix.forest_detection": {"n": 4},
    "matrix.st_shortest_path": {"n": 4},
    "matrix.topological_sort": {"n": 4},
    "matrix.components": {"n": 4},
    "matrix.strongly_connected_components": {"n": 3},
    "matrix.smallest_cycle_via_vertex": {"n": 3},
    "matrix.k_cycle_via_vertex": {"n": 4, "members": 2, "rounds": 2},
    "list.bfs_tree": {"n": 4},
    "list.st_shortest_path": {"n": 4},
    "list.bipartiteness": {"n": 4},
    "list.topological_sort": {"n": 4},
    "list.components": {"n": 4},
    "list.hopcroft_karp_matching": {"a": 2, "b": 2},
}


def test_every_problem_has_small_params():
    assert set(problem_names()) == set(SMALL)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_entry_validates(entry, name):
    e = entry(name, **SMALL[name])
    for _, tree in e.family.members:
        rep = validate(tree, e.fn, check_labels=not e.randomized)
        assert rep.ok, rep.issues[:2]
    if e.check_output is not None and not e.randomized:
        for x in e.fn.domain:
            assert e.check_output(x, evaluate_path(e.tree, x).leaf_label), x


def test_unknown_problem():
    with pytest.raises(ParamError):
        get_entry("no_such_problem")
    with pytest.raises(ParamError):
        get_entry("search", bogus=1)


# ---------------------------------------------------------------- encodings

def test_matrix_round_trip():
    for directed in (False, True):
        for g in all_graphs(3, directed):
            assert decode_matrix(encode_matrix(g), 3, directed) == g


def test_list_round_trip():
    for g in all_graphs(4):
        assert decode_list(encode_list(g), 4) == g


@pytest.mark.parametrize("x,msg", [
    ((1, 2), "expected"),
    ((1, 9, 3, 3, 3, 3), "outside"),
    ((3, 1, 0, 3, 3, 3), "after nil"),
    ((0, 3, 3, 3, 3, 3), "self-loop"),
    ((1, 3, 3, 3, 3, 3), "consistent"),
])
def test_decode_list_errors(x, msg):
    with pytest.raises(EncodingError, match=msg):
        decode_list(x, 3)


# ---------------------------------------------------------------- reductions

def test_reverse_twice():
    g = GraphInstance.of(3, [(0, 1), (1, 2)], directed=True)
    assert reduction_graphs("reverse_graph", reduction_graphs("reverse_graph", g)) == g
    assert reduction_graphs("reverse_graph", g).has_edge(1, 0)


def test_cycle_reduction_iff_connected():
    s, t = 0, 2
    for g in all_graphs(3, directed=True):
        h = cycle_reduction(g, s, t)
        through = ref.brute_smallest_cycle_through(h, 3)
        d = ref.brute_distance(g, s, t)
        assert (through is not None) == (d is not None)
        if d is not None:
            assert through == d + 2


def test_smallest_cycle_via_reduction(entry):
    e = entry("matrix.smallest_cycle_via_vertex", n=3, s=0, t=2)
    assert validate(e.tree, e.fn).ok
    for x in e.fn.domain:
        g = decode_matrix(x, 3, True)
        d = ref.brute_distance(g, 0, 2)
        assert e.fn(x) == (None if d is None else d + 2)


def test_k_cycle_subgraph_keeps_consistent_arcs():
    g = GraphInstance.of(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    draw = CycleDraw.draw(4, 3, random.Random(1))
    h = k_cycle_subgraph(g, draw)
    assert h.directed
    for u, w in h.edges:
        assert g.has_edge(u, w) and draw.C[u] == (draw.C[w] + 1) % 3
    assert reduction_graphs("k_cycle_subgraph_H", g, {"k": 3}, seed=1) == h


# ---------------------------------------------------------------- list problems

def test_counting_threshold_two_twos(entry):
    c = entry("counting", n=3)
    m = tree_metrics(c.tree, c.fn)
    assert m.T == 3
    th = entry("threshold", n=4, k=2)
    assert th.fn((1, 0, 1, 0)) and not th.fn((1, 1, 1, 0))
    assert tree_metrics(th.tree, th.fn).G == 3
    tt = entry("two_twos", n=4)
    assert tt.fn((2, 0, 2, 1)) == "yes" and tt.fn((2, 0, 1, 1)) == "no"


# ---------------------------------------------------------------- graph problems

def test_bipartiteness_cycles(entry):
    e4 = entry("matrix.bipartiteness", n=4)
    square = encode_matrix(GraphInstance.of(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert evaluate_path(e4.tree, square).leaf_label is True
    five = GraphInstance.of(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    e5 = get_entry("matrix.bipartiteness", n=5, domain=[five])
    pentagon = encode_matrix(five)
    assert evaluate_path(e5.tree, pentagon).leaf_label is False


def test_hopcroft_karp_complete(entry):
    e = entry("list.hopcroft_karp_matching", a=2, b=2)
    k22 = encode_list(GraphInstance.of(4, [(0, 2), (0, 3), (1, 2), (1, 3)]))
    lab = evaluate_path(e.tree, k22).leaf_label
    assert len(lab) == 2 and e.check_output(k22, lab)


def test_list_bfs_transcript(entry):
    e = entry("list.bfs_tree", n=4)
    x = encode_list(GraphInstance.of(4, [(0, 1), (0, 2), (1, 3)]))
    assert x == (1, 2, 4, 0, 3, 4, 0, 4, 4, 1, 4, 4)
    t = evaluate_path(e.tree, x)
    assert t.queries == (1, 2, 3, 4, 5, 6, 7, 8, 10, 11)
    assert "".join(c[0] for c in t.colors) == "rrrbrrbrbr"
    assert path_stats(t).G == 7 and path_stats(t).T == 10
    assert t.leaf_label == (-1, 0, 0, 1)


def test_all_orderings(entry):
    canon = entry("list.components", n=3)
    every = get_entry("list.components", n=3, domain="all_orderings")
    assert len(every.fn.domain) > len(canon.fn.domain)
    assert validate(every.tree, every.fn).ok
    with pytest.raises(ParamError):
        get_entry("list.components", n=4, domain="all_orderings")


def test_scc_and_topological(entry):
    e = entry("matrix.strongly_connected_components", n=3)
    for x in e.fn.domain:
        assert evaluate_path(e.tree, x).leaf_label == ref.brute_scc(decode_matrix(x, 3, True))
    t = entry("matrix.topological_sort", n=4)
    for x in t.fn.domain:
        assert ref.is_topological_order(decode_matrix(x, 4, True), evaluate_path(t.tree, x).leaf_label)
