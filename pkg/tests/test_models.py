import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cnsdist import models
from cnsdist.graph import fit_degree_exponent
from cnsdist.models import (ba_gamma_matrix, gamma_unified, node_type_counts, ring_distance,
                            s_count, sample_graph)

from oracles import ring_common_count


def test_gamma_unified_examples():
    assert gamma_unified(0, 2, 10, 2, 1.0, 0.0) == 1.0
    assert gamma_unified(0, 5, 10, 2, 1.0, 0.0) == 0.0
    p = 0.3
    assert all(gamma_unified(0, j, 10, 2, p, p) == p for j in range(1, 10))
    assert gamma_unified(0, 9, 10, 2, 0.7, 0.1) == 0.7


def test_gamma_unified_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gamma_unified(0, 1, 9, 2, 1.0, 0.0)
    with pytest.raises(ValueError):
        gamma_unified(0, 1, 10, 2, 1.5, 0.0)
    with pytest.raises(ValueError):
        gamma_unified(1, 1, 10, 2, 1.0, 0.0)


def test_ring_distance_is_circular():
    assert ring_distance(0, 9, 10) == 1
    assert ring_distance(2, 7, 10) == 5
    assert ring_distance(3, 3, 10) == 0


def test_s_count_examples():
    assert s_count(0, 2, 20, 3) == 3
    # nodes 0 and 4 with m=3 share ring neighbors 1, 2, 3
    assert s_count(0, 4, 20, 3) == 3 == ring_common_count(0, 4, 20, 3)
    assert s_count(0, 7, 16, 3) == 0


@given(m=st.integers(0, 6), extra=st.integers(0, 10), data=st.data())
@settings(max_examples=80, deadline=None)
def test_node_type_counts_match_ring_scan(m, extra, data):
    n = 4 * m + 2 + extra
    j = data.draw(st.integers(1, n - 1))
    s, mixed, far = node_type_counts(0, j, n, m)
    assert s == s_count(0, j, n, m) == ring_common_count(0, j, n, m)
    near_i = {t for t in range(n) if t not in (0, j) and ring_distance(t, 0, n) <= m}
    near_j = {t for t in range(n) if t not in (0, j) and ring_distance(t, j, n) <= m}
    assert mixed == len(near_i ^ near_j)
    assert far == n - 2 - len(near_i | near_j)
    assert min(s, mixed, far) >= 0


@pytest.mark.parametrize("make, eta, alpha", [
    (lambda: models.rrl(50, 4), 1.0, 0.0),
    (lambda: models.mrl(50, 4, 0.3), 0.7, 0.0),
    (lambda: models.er(50, 6.0), 6 / 49, 6 / 49),
    (lambda: models.ws(50, 4, 0.3), 0.7, 2 * 4 * 0.3 / (50 - 1 - 8)),
    (lambda: models.nw(50, 4, 0.3), 1.0, 2 * 4 * 0.3 / (50 - 1 - 8)),
])
def test_specializations_match_unified(make, eta, alpha):
    model = make()
    m = model.m
    for j in range(1, 50):
        assert model.gamma(3, (3 + j) % 50) == pytest.approx(
            gamma_unified(3, (3 + j) % 50, 50, m, eta, alpha), abs=1e-15)


@pytest.mark.parametrize("model", [
    models.rrl(60, 5), models.mrl(60, 5, 0.2), models.er(60, 7.5), models.ws(60, 5, 0.4),
    models.nw(60, 5, 0.4), models.unified(60, 5, 0.6, 0.05), models.ba(60, 3),
])
def test_gamma_matrix_symmetric(model):
    g = model.gamma_matrix()
    assert np.allclose(g, g.T, atol=0)
    assert np.all(np.diag(g) == 0)
    assert np.all((g >= 0) & (g <= 1))
    assert np.allclose(g.sum(axis=1), [model.gamma_row(i).sum() for i in range(model.n)])


def test_er_rows_sum_to_mean_degree():
    model = models.er(500, 20.0)
    assert model.gamma_row(17).sum() == pytest.approx(20.0, rel=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.4, 1.0])
def test_ws_conserves_link_count(p):
    model = models.ws(200, 6, p)
    assert model.expected_edges() == pytest.approx(6 * 200, rel=1e-12)
    assert np.triu(model.gamma_matrix(), 1).sum() == pytest.approx(6 * 200, rel=1e-12)


def test_ba_two_candidates_half_each():
    # node 2 arrives to nodes 0, 1 of degree 1 each: 2 (1 - (1/2)^T) = 1 gives T = 1
    assert models._solve_trials(np.array([0.5, 0.5]), 1, node=2) == pytest.approx(1.0, abs=1e-9)
    g, res = ba_gamma_matrix(3, 1, 2)
    assert g[2, 0] == pytest.approx(0.5, abs=1e-10)
    assert g[2, 1] == pytest.approx(0.5, abs=1e-10)


def test_ba_forced_when_candidates_equal_m():
    g, res = ba_gamma_matrix(5, 2, 2)
    assert g[2, 0] == g[2, 1] == 1.0
    assert np.all(res == 0)


def test_ba_clamps_when_fewer_candidates():
    # m0 = 1 and m = 1: the first arrival has one reachable candidate
    g, res = ba_gamma_matrix(4, 1, 1)
    assert g[1, 0] == 1.0
    assert np.allclose(g[3, :3].sum(), 1.0)


def test_ba_rows_sum_to_m():
    g, res = ba_gamma_matrix(400, 5, 7)
    rows = np.array([g[i, :i].sum() for i in range(7, 400)])
    assert np.max(np.abs(rows - 5)) < 1e-8
    assert np.all(g[:7, :7] + np.eye(7) == 1.0)


def test_ba_validation():
    with pytest.raises(ValueError):
        ba_gamma_matrix(10, 3, 2)
    with pytest.raises(ValueError):
        ba_gamma_matrix(5, 2, 5)


def test_rrl_sample_is_regular():
    g = sample_graph(models.rrl(1000, 50), seed=0)
    assert np.all(g.degrees == 100)
    assert g.num_edges == 50_000


def test_ws_sample_keeps_link_count_and_is_simple():
    g = sample_graph(models.ws(300, 5, 0.4), seed=3)
    assert g.num_edges == 1500
    assert g.mean_degree == 10.0
    # a fair share of links left the lattice
    far = np.count_nonzero(ring_distance(g.edges[:, 0], g.edges[:, 1], 300) > 5)
    assert 0.3 < far / 1500 < 0.5


def test_bernoulli_sample_deterministic():
    model = models.unified(80, 3, 0.7, 0.05)
    a, b = sample_graph(model, 11), sample_graph(model, 11)
    assert a.edges.tolist() == b.edges.tolist()
    assert sample_graph(model, 12).edges.tolist() != a.edges.tolist()


@pytest.mark.slow
def test_er_sample_mean_degree():
    model = models.er(10_000, 500.0)
    means = [sample_graph(model, s).mean_degree for s in range(10)]
    assert abs(np.mean(means) - 500) / 500 < 0.01


@pytest.mark.slow
def test_ba_sample_degree_exponent():
    g = sample_graph(models.ba(5000, 25), seed=5)
    assert 2.5 <= fit_degree_exponent(g.degrees) <= 3.5


def test_from_descriptor():
    assert models.from_descriptor({"kind": "er", "n": 100, "k": 9.9}).eta == pytest.approx(0.1)
    assert models.from_descriptor({"kind": "ba", "n": 50, "k": 4}).m == 2
    assert models.from_descriptor({"kind": "ws", "n": 50, "m": 3, "p": 0.2}).eta == 0.8
    with pytest.raises(ValueError):
        models.from_descriptor({"kind": "static", "n": 10})
