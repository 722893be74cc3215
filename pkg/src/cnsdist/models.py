"""Connection-probability models and matching random-graph samplers.

Every model exposes ``gamma_row(i)``: the vector of connection probabilities
between node ``i`` and all nodes (zero at ``i``). The ring family (RRL, MRL,
ER, WS, NW and the unified ring model) is a two-level model: probability
``eta`` within circular label distance ``m`` and ``alpha`` beyond it. The BA
model carries a dense probability matrix built node by node.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .graph import Graph

KINDS = ("rrl", "mrl", "er", "ws", "nw", "unified", "ba")
RING_KINDS = ("rrl", "mrl", "er", "ws", "nw", "unified")


class ConvergenceError(RuntimeError):
    """A numerical solve failed to converge."""


def ring_distance(i, j, n: int):
    d = np.abs(np.asarray(i) - np.asarray(j)) % n
    return np.minimum(d, n - d)


def _check_ring(n: int, m: int) -> None:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if n < 4 * m + 2:
        raise ValueError(f"ring models need n >= 4m+2 (n={n}, m={m})")


def _check_prob(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name}={x} outside [0, 1]")


def gamma_unified(i: int, j: int, n: int, m: int, eta: float, alpha: float) -> float:
    """Connection probability of pair (i, j) in the unified ring model."""
    _check_ring(n, m)
    _check_prob("eta", eta)
    _check_prob("alpha", alpha)
    if i == j:
        raise ValueError("i and j must differ")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("node id out of range")
    return eta if ring_distance(i, j, n) <= m else alpha


def s_count(i: int, j: int, n: int, m: int) -> int:
    """Number of nodes t (other than i, j) within ring distance m of both i and j.

    ``2m-1-d`` for ``0 < d <= m``, ``2m+1-d`` for ``m < d <= 2m``, else 0,
    where ``d`` is the circular distance of the pair.
    """
    _check_ring(n, m)
    if i == j:
        raise ValueError("i and j must differ")
    d = int(ring_distance(i, j, n))
    if d <= m:
        return 2 * m - 1 - d
    if d <= 2 * m:
        return 2 * m + 1 - d
    return 0


def node_type_counts(i: int, j: int, n: int, m: int) -> tuple[int, int, int]:
    """Counts of the other nodes near both, exactly one, or neither of i and j."""
    s = s_count(i, j, n, m)
    adj = 1 if ring_distance(i, j, n) <= m else 0
    mixed = 4 * m - 2 * s - 2 * adj
    return s, mixed, n - 2 - s - mixed


@dataclass(frozen=True, eq=False)
class ProbModel:
    kind: str
    n: int
    m: int = 0
    eta: float = 0.0
    alpha: float = 0.0
    params: dict = field(default_factory=dict)
    matrix: Optional[np.ndarray] = None

    @property
    def translation_invariant(self) -> bool:
        return self.kind in RING_KINDS

    def gamma(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if self.matrix is not None:
            return float(self.matrix[i, j])
        return self.eta if ring_distance(i, j, self.n) <= self.m else self.alpha

    def gamma_row(self, i: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[i]
        d = ring_distance(i, np.arange(self.n), self.n)
        row = np.where(d <= self.m, self.eta, self.alpha)
        row[i] = 0.0
        return row

    def gamma_matrix(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        idx = np.arange(self.n)
        d = ring_distance(idx[:, None], idx[None, :], self.n)
        g = np.where(d <= self.m, self.eta, self.alpha)
        np.fill_diagonal(g, 0.0)
        return g

    def expected_edges(self) -> float:
        if self.matrix is not None:
            return float(np.triu(self.matrix, 1).sum())
        near = self.n * self.m
        return near * self.eta + (self.n * (self.n - 1) // 2 - near) * self.alpha

    def expected_mean_degree(self) -> float:
        return 2.0 * self.expected_edges() / self.n

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        d.update(self.params)
        return d

    def __repr__(self) -> str:
        return f"ProbModel({self.kind}, n={self.n}, {self.params})"


def unified(n: int, m: int, eta: float, alpha: float) -> ProbModel:
    _check_ring(n, m)
    _check_prob("eta", eta)
    _check_prob("alpha", alpha)
    return ProbModel("unified", n, m, eta, alpha, {"m": m, "eta": eta, "alpha": alpha})


def rrl(n: int, m: int) -> ProbModel:
    _check_ring(n, m)
    return ProbModel("rrl", n, m, 1.0, 0.0, {"m": m})


def mrl(n: int, m: int, p: float) -> ProbModel:
    _check_ring(n, m)
    _check_prob("p", p)
    return ProbModel("mrl", n, m, 1.0 - p, 0.0, {"m": m, "p": p})


def er(n: int, mean_degree: float) -> ProbModel:
    if n < 2:
        raise ValueError("ER needs n >= 2")
    p = mean_degree / (n - 1)
    _check_prob("mean_degree/(n-1)", p)
    return ProbModel("er", n, 0, p, p, {"k": mean_degree})


def _far_prob(n: int, m: int, p: float) -> float:
    return 2.0 * m * p / (n - 1 - 2 * m)


def ws(n: int, m: int, p: float) -> ProbModel:
    _check_ring(n, m)
    _check_prob("p", p)
    return ProbModel("ws", n, m, 1.0 - p, _far_prob(n, m, p), {"m": m, "p": p})


def nw(n: int, m: int, p: float) -> ProbModel:
    _check_ring(n, m)
    _check_prob("p", p)
    return ProbModel("nw", n, m, 1.0, _far_prob(n, m, p), {"m": m, "p": p})


def _solve_trials(p: np.ndarray, m: int, node: int, tol: float = 1e-10,
                  max_iter: int = 400) -> float:
    """Solve sum_j [1 - (1-p_j)^T] = m for T by bracketed bisection."""
    with np.errstate(divide="ignore"):
        logq = np.log1p(-p)

    def g(t):
        return float(np.sum(-np.expm1(t * logq))) - m

    lo, hi = float(m), 64.0 * m
    while g(hi) < 0:
        lo, hi = hi, 2 * hi
        if hi > 1e300:
            raise ConvergenceError(f"BA trial count bracket failed at node {node}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            return mid
        if gm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            return mid
    raise ConvergenceError(f"BA trial count bisection did not converge at node {node}")


def ba_gamma_matrix(n: int, m: int, m0: int | None = None, *, tol: float = 1e-10):
    """Pairwise connection probabilities of the BA growth process.

    The first ``m0`` nodes form a clique. Each arriving node ``i`` makes ``T_i``
    degree-proportional selections, where ``T_i`` is fixed so the expected
    number of distinct targets is exactly ``m``; degrees then grow by the
    connection probabilities. Returns ``(gamma, residuals)`` where
    ``residuals[i]`` is ``sum_{j<i} gamma[i, j] - m`` (nonzero only when fewer
    than ``m`` candidates can be reached and the row is clamped).
    """
    m0 = m if m0 is None else m0
    if not 1 <= m <= m0 < n:
        raise ValueError(f"BA needs 1 <= m <= m0 < n (m={m}, m0={m0}, n={n})")
    gamma = np.zeros((n, n))
    gamma[:m0, :m0] = 1.0
    np.fill_diagonal(gamma, 0.0)
    deg = np.zeros(n)
    deg[:m0] = m0 - 1
    residuals = np.zeros(n)
    for i in range(m0, n):
        k = deg[:i]
        total = k.sum()
        p = k / total if total > 0 else np.full(i, 1.0 / i)
        reachable = np.count_nonzero(p > 0)
        if reachable <= m:
            row = (p > 0).astype(float)
            residuals[i] = row.sum() - m
        else:
            t = _solve_trials(p, m, i, tol)
            with np.errstate(divide="ignore"):
                row = -np.expm1(t * np.log1p(-p))
        gamma[i, :i] = row
        gamma[:i, i] = row
        deg[:i] += row
        deg[i] = row.sum()
    gamma.setflags(write=False)
    return gamma, residuals


def ba(n: int, m: int, m0: int | None = None) -> ProbModel:
    m0 = m if m0 is None else m0
    g, res = ba_gamma_matrix(n, m, m0)
    return ProbModel("ba", n, m, params={"m": m, "m0": m0}, matrix=g)


def from_descriptor(desc: dict) -> ProbModel:
    """Build a model from ``{kind, n, m, p, eta, alpha, m0, k}``; unknown keys are ignored."""
    kind = str(desc["kind"]).lower()
    n = int(desc["n"])
    get = desc.get
    if kind == "rrl":
        return rrl(n, int(desc["m"]))
    if kind == "mrl":
        return mrl(n, int(desc["m"]), float(desc["p"]))
    if kind == "er":
        if get("k") is not None:
            return er(n, float(desc["k"]))
        return er(n, float(desc["p"]) * (n - 1))
    if kind == "ws":
        return ws(n, int(desc["m"]), float(desc["p"]))
    if kind == "nw":
        return nw(n, int(desc["m"]), float(desc["p"]))
    if kind == "unified":
        return unified(n, int(desc["m"]), float(desc["eta"]), float(desc["alpha"]))
    if kind == "ba":
        m = int(desc["m"]) if get("m") is not None else int(desc["k"]) // 2
        return ba(n, m, int(desc["m0"]) if get("m0") is not None else None)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")


def load_descriptor(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- samplers ---------------------------------------------------------------

def _row_uniforms(seed: int, i: int, size: int) -> np.ndarray:
    # counter-based stream keyed by (seed, row): independent of evaluation order
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, i])
    return np.random.Generator(bitgen).random(size)


def _bernoulli_graph(model: ProbModel, seed: int) -> Graph:
    n = model.n
    chunks = []
    for i in range(n - 1):
        row = model.gamma_row(i)[i + 1:]
        u = _row_uniforms(seed, i, n - i - 1)
        js = np.nonzero(u < row)[0] + i + 1
        if len(js):
            chunks.append(np.column_stack([np.full(len(js), i), js]))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), np.int64)
    return Graph.from_edges(n, edges)


def _ring_edges(n: int, m: int) -> np.ndarray:
    i = np.repeat(np.arange(n), m)
    j = (i + np.tile(np.arange(1, m + 1), n)) % n
    return np.column_stack([i, j])


def _ws_rewire(n: int, m: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    adj = [set() for _ in range(n)]
    for a, b in _ring_edges(n, m):
        adj[a].add(b)
        adj[b].add(a)
    # each original clockwise link (i, i+d) keeps endpoint i and may move i+d
    for d in range(1, m + 1):
        for i in range(n):
            j = (i + d) % n
            if rng.random() >= p or j not in adj[i]:
                continue
            if len(adj[i]) >= n - 1:
                continue
            while True:
                k = int(rng.integers(n))
                if k != i and k not in adj[i]:
                    break
            adj[i].discard(j)
            adj[j].discard(i)
            adj[i].add(k)
            adj[k].add(i)
    edges = [(a, b) for a in range(n) for b in adj[a] if a < b]
    return Graph.from_edges(n, edges)


def sample_graph(model: ProbModel, seed: int) -> Graph:
    """Draw one graph from ``model``.

    RRL is deterministic. WS uses constructive rewiring of a ring lattice.
    All other kinds draw each pair independently with its connection
    probability.
    """
    if model.kind == "rrl":
        return Graph.from_edges(model.n, _ring_edges(model.n, model.m))
    if model.kind == "ws":
        return _ws_rewire(model.n, model.m, model.params["p"], seed)
    return _bernoulli_graph(model, seed)
