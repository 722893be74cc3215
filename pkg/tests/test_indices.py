import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnsdist import models
from cnsdist.cns import Pmf
from cnsdist.graph import Graph
from cnsdist.indices import (KatzDivergenceError, ScoreTable, aa_matrix, cn_matrix, katz_matrix,
                             katz_connected_shift, lp_matrix, ra_matrix, score_aa, score_cn,
                             score_matrix, score_ra)
from cnsdist.models import sample_graph

from oracles import matrix_walks


def bowtie():
    # two triangles joined at node 2
    return Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


def test_bowtie_hand_values():
    g = bowtie()
    assert score_cn(g, (0, 3)) == 1
    assert score_ra(g, (0, 3)) == pytest.approx(1 / 4)
    assert score_aa(g, (0, 3)) == pytest.approx(1 / math.log(4))
    # common neighbors of 0 and 1: node 2 only
    assert score_aa(g, (0, 1)) == pytest.approx(1 / math.log(4))
    # common neighbors of 2 and 3: node 4 of degree 2
    assert score_ra(g, (2, 3)) == pytest.approx(1 / 2)
    assert score_cn(g, (1, 4)) == 1


@given(st.integers(3, 15), st.floats(0.1, 0.8), st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_matrices_match_per_pair_scores(n, p, seed):
    g = sample_graph(models.er(n, p * (n - 1)), seed)
    cn, ra, aa = cn_matrix(g), ra_matrix(g), aa_matrix(g)
    for u in range(n):
        for v in range(u + 1, n):
            assert cn[u, v] == score_cn(g, (u, v))
            assert ra[u, v] == pytest.approx(score_ra(g, (u, v)), abs=1e-12)
            assert aa[u, v] == pytest.approx(score_aa(g, (u, v)), abs=1e-12)


def test_lp_matches_matrix_powers():
    g = sample_graph(models.er(60, 8.0), 2)
    a = g.adjacency().toarray()
    want = matrix_walks(a, 2) + 0.02 * matrix_walks(a, 3)
    assert np.allclose(lp_matrix(g, 0.02, block=7), want, atol=1e-12, rtol=0)
    with pytest.raises(ValueError):
        lp_matrix(g, -0.1)


def test_katz_single_edge():
    g = Graph.from_edges(2, [(0, 1)])
    phi = 0.3
    s = katz_matrix(g, phi, tol=1e-14)
    # odd walks between the endpoints, even walks back to each endpoint
    assert s[0, 1] == pytest.approx(phi / (1 - phi ** 2), abs=1e-12)
    assert s[0, 0] == pytest.approx(phi ** 2 / (1 - phi ** 2), abs=1e-12)


def test_katz_matches_series_and_inverse():
    g = sample_graph(models.er(50, 6.0), 0)
    a = g.adjacency().toarray()
    phi = 0.01
    series = sum(phi ** l * matrix_walks(a, l) for l in range(1, 31))
    s = katz_matrix(g, phi, block=16)
    assert np.max(np.abs(s - series)) < 1e-10
    closed = np.linalg.inv(np.eye(50) - phi * a) - np.eye(50)
    assert np.max(np.abs(katz_matrix(g, phi, tol=1e-14) - closed)) < 1e-13


def test_katz_divergence_raises():
    g = sample_graph(models.er(50, 6.0), 0)
    with pytest.raises(KatzDivergenceError):
        katz_matrix(g, 1.0)
    with pytest.raises(KatzDivergenceError):
        katz_matrix(g, 0.14, max_iter=5)


def test_score_matrix_dispatch():
    g = bowtie()
    assert np.array_equal(score_matrix(g, "CN"), cn_matrix(g))
    assert np.array_equal(score_matrix(g, "katz-shifted", 0.05), score_matrix(g, "katz", 0.05))
    with pytest.raises(ValueError):
        score_matrix(g, "jaccard")


def test_score_table_csv():
    t = ScoreTable.build(bowtie(), "cn")
    assert len(t.scores_connected) == 6 and len(t.scores_unconnected) == 4
    buf = io.StringIO()
    t.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "u,v,score,class"
    assert len(lines) == 11
    assert "0,3,1.0,d" in lines


def test_katz_shift():
    p = Pmf(np.array([0.5, 1.0]), np.array([0.5, 0.5]))
    assert katz_connected_shift(p, 0.01).support.tolist() == [0.49, 0.99]
