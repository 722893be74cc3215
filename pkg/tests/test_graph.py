import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnsdist.graph import (EdgeListParseError, Graph, NodeSet, cns, fit_degree_exponent,
                           load_edge_list, pair_arrays, pair_classes, write_edge_list,
                           write_label_map)


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])


def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_load_dedupes_and_drops_self_loops():
    g = load_edge_list(["1 2", "2 1", "3 3", "2 3"])
    assert g.n == 3
    assert g.edges.tolist() == [[0, 1], [1, 2]]
    assert g.labels == (1, 2, 3)


def test_load_skips_comments():
    g = load_edge_list(["# comment", "0 1"])
    assert (g.n, g.num_edges) == (2, 1)


def test_load_konect_header():
    text = """% sym unweighted
% 7 5 5
1 2 1 1000
1 3 1 1001
2 3 1 1002
3 5 1 1003
5 4 1 1004
4 5 1 1005

1 3 1 1006
"""
    g = load_edge_list(text)
    # hand count: nodes {1,2,3,4,5}; distinct undirected links 12, 13, 23, 35, 45
    assert g.n == 5
    assert g.num_edges == 5
    assert g.labels == (1, 2, 3, 5, 4)
    assert g.has_edge(g.labels.index(5), g.labels.index(4))


def test_self_loop_only_node_is_kept():
    g = load_edge_list(["0 1", "7 7"])
    assert g.n == 3
    assert g.isolated_count() == 1


@pytest.mark.parametrize("lines, lineno", [
    (["0 1", "0 x"], 2),
    (["# c", "5"], 2),
    (["1.5 2"], 1),
])
def test_load_malformed(lines, lineno):
    with pytest.raises(EdgeListParseError) as err:
        load_edge_list(lines)
    assert err.value.line == lineno


def test_load_empty():
    with pytest.raises(EdgeListParseError):
        load_edge_list(["# nothing here", ""])


def test_edge_list_round_trip():
    g = load_edge_list(["10 20", "20 30", "30 10", "40 10"])
    buf = io.StringIO()
    write_edge_list(g, buf)
    h = load_edge_list(buf.getvalue())
    assert h.edges.tolist() == g.edges.tolist()


def test_label_map_csv():
    g = load_edge_list(["10 20", "20 30"])
    buf = io.StringIO()
    write_label_map(g, buf)
    assert buf.getvalue().splitlines() == ["original_label,dense_id", "10,0", "20,1", "30,2"]


def test_cns_examples():
    assert cns(triangle(), {0, 1}) == 1
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert cns(path, [0, 2]) == 1
    assert cns(path, [0, 1]) == 0
    assert cns(path, [0, 1, 2]) == 0


def test_cns_singleton_is_degree():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    for v in range(5):
        assert cns(g, [v]) == g.degree(v)


def test_cns_out_of_range():
    with pytest.raises(IndexError):
        cns(triangle(), [0, 3])
    with pytest.raises(ValueError):
        NodeSet.of([])


def test_pair_classes_counts():
    c, d = pair_classes(triangle())
    assert (len(list(c)), len(list(d))) == (3, 0)
    c, d = pair_classes(Graph.from_edges(4, []))
    assert (len(list(c)), len(list(d))) == (0, 6)


def test_pair_classes_jazz_sized():
    # a graph with the Jazz network's size: 198 nodes, 5484 links
    rng = np.random.default_rng(0)
    pairs = np.array(list(itertools.combinations(range(198), 2)))
    g = Graph.from_edges(198, pairs[rng.choice(len(pairs), 5484, replace=False)])
    c, d = pair_arrays(g)
    assert len(c) == 5484
    assert len(d) == 198 * 197 // 2 - 5484 == 14019


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_graph_invariants(g):
    assert g.degrees.sum() == 2 * g.num_edges
    for u in range(g.n):
        nb = g.neighbors(u)
        assert np.all(np.diff(nb) > 0)
        assert u not in nb
        for v in nb:
            assert u in g.neighbors(v)
    c, d = pair_classes(g)
    c, d = list(c), list(d)
    assert len(c) + len(d) == g.n * (g.n - 1) // 2
    assert set(c).isdisjoint(d)
    pc, pd = pair_arrays(g)
    assert sorted(map(tuple, pc.tolist())) == sorted(c)
    assert sorted(map(tuple, pd.tolist())) == sorted(d)


@given(graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_cns_matches_scan_and_is_monotone(g, data):
    q = data.draw(st.integers(1, g.n))
    members = data.draw(st.permutations(range(g.n)))[:q]
    adj = g.adjacency().toarray()
    brute = sum(1 for t in range(g.n)
                if t not in members and all(adj[v, t] for v in members))
    assert cns(g, members) == brute
    assert cns(g, list(reversed(members))) == brute
    if q < g.n:
        extra = [v for v in range(g.n) if v not in members][0]
        assert cns(g, members + [extra]) <= brute
    assert cns(g, range(g.n)) == 0


def test_fit_degree_exponent_on_sampled_power_law():
    rng = np.random.default_rng(1)
    # continuous law from kmin - 1/2, rounded: the estimator's own approximation
    k = np.floor(9.5 * (1 - rng.random(50_000)) ** (-1 / 2.0) + 0.5)
    assert abs(fit_degree_exponent(k, kmin=10) - 3.0) < 0.1
