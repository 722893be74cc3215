"""Similarity indices for link prediction: CN, RA, AA, LP and Katz."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy import sparse

from .cns import Pmf
from .graph import Graph, pair_arrays

INDICES = ("cn", "ra", "aa", "lp", "katz", "katz-shifted")
LP_PHI = 0.02
KATZ_PHI = 0.01


class KatzDivergenceError(ArithmeticError):
    """The Katz series does not converge for this attenuation factor."""


def _common(graph: Graph, a: int, b: int) -> np.ndarray:
    return np.intersect1d(graph.neighbors(a), graph.neighbors(b), assume_unique=True)


def score_cn(graph: Graph, pair) -> int:
    a, b = pair
    return int(len(_common(graph, a, b)))


def score_ra(graph: Graph, pair) -> float:
    a, b = pair
    k = graph.degrees[_common(graph, a, b)]
    return float(np.sum(1.0 / k))


def score_aa(graph: Graph, pair) -> float:
    # a common neighbor has degree >= 2, so log(k) > 0
    a, b = pair
    k = graph.degrees[_common(graph, a, b)]
    return float(np.sum(1.0 / np.log(k)))


# -- whole-graph score matrices ------------------------------------------------

def _weighted_cn(graph: Graph, weights: np.ndarray) -> np.ndarray:
    a = graph.adjacency()
    return (a @ sparse.diags(weights) @ a).toarray()


def cn_matrix(graph: Graph) -> np.ndarray:
    a = graph.adjacency()
    return (a @ a).toarray()


def ra_matrix(graph: Graph) -> np.ndarray:
    k = graph.degrees.astype(float)
    return _weighted_cn(graph, np.divide(1.0, k, out=np.zeros_like(k), where=k > 0))


def aa_matrix(graph: Graph) -> np.ndarray:
    k = graph.degrees.astype(float)
    w = np.zeros_like(k)
    np.divide(1.0, np.log(k, where=k > 1, out=np.ones_like(k)), out=w, where=k > 1)
    return _weighted_cn(graph, w)


def lp_matrix(graph: Graph, phi: float = LP_PHI, block: int = 512) -> np.ndarray:
    """A^2 + phi A^3, built from sparse products against column blocks of A."""
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    a = graph.adjacency()
    out = np.empty((graph.n, graph.n))
    for c0 in range(0, graph.n, block):
        cols = a[:, c0:c0 + block].toarray()
        a2 = a @ cols
        out[:, c0:c0 + block] = a2 + phi * (a @ a2)
    return out


def katz_matrix(graph: Graph, phi: float = KATZ_PHI, tol: float = 1e-10,
                max_iter: int = 10_000, block: int = 512) -> np.ndarray:
    """Solve (I - phi A) S = phi A, i.e. S = sum_{l>=1} phi^l A^l.

    Iterates ``X <- phi A (I + X)`` on column blocks until the estimated
    remaining error falls below ``tol`` relative to the iterate. A growing update or an exhausted
    iteration budget raises :class:`KatzDivergenceError`.
    """
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    a = graph.adjacency()
    n = graph.n
    out = np.empty((n, n))
    for c0 in range(0, n, block):
        c1 = min(n, c0 + block)
        rhs = phi * a[:, c0:c1].toarray()
        x = rhs.copy()
        prev = np.inf
        growing = 0
        for it in range(max_iter):
            nxt = rhs + phi * (a @ x)
            delta = np.max(np.abs(nxt - x)) if x.size else 0.0
            x = nxt
            if not np.isfinite(delta):
                raise KatzDivergenceError(f"Katz iteration overflowed (phi={phi})")
            scale = max(1.0, np.max(np.abs(x)))
            # remaining error of a contraction with ratio r is about delta r / (1 - r)
            r = delta / prev if prev > 0 and np.isfinite(prev) else 1.0
            if delta <= 4 * np.finfo(float).eps * scale or (
                    r < 1 and delta * r / (1 - r) <= tol * scale and delta <= tol * scale):
                break
            growing = growing + 1 if delta > prev else 0
            if growing >= 50:
                raise KatzDivergenceError(
                    f"Katz iteration diverges; phi={phi} is not below 1/spectral radius")
            prev = delta
        else:
            raise KatzDivergenceError(f"Katz iteration did not converge in {max_iter} steps")
        out[:, c0:c1] = x
    return 0.5 * (out + out.T)


def score_matrix(graph: Graph, index: str, phi: float | None = None) -> np.ndarray:
    index = index.lower()
    if index == "cn":
        return cn_matrix(graph)
    if index == "ra":
        return ra_matrix(graph)
    if index == "aa":
        return aa_matrix(graph)
    if index == "lp":
        return lp_matrix(graph, LP_PHI if phi is None else phi)
    if index in ("katz", "katz-shifted"):
        return katz_matrix(graph, KATZ_PHI if phi is None else phi)
    raise ValueError(f"unknown index {index!r}; valid indices: {', '.join(INDICES)}")


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Scores of every unordered pair, split into connected and unconnected pairs."""

    index: str
    phi: float | None
    pairs_connected: np.ndarray
    scores_connected: np.ndarray
    pairs_unconnected: np.ndarray
    scores_unconnected: np.ndarray

    @classmethod
    def build(cls, graph: Graph, index: str, phi: float | None = None,
              matrix: np.ndarray | None = None) -> "ScoreTable":
        s = score_matrix(graph, index, phi) if matrix is None else matrix
        pc, pd = pair_arrays(graph)
        if index == "lp" and phi is None:
            phi = LP_PHI
        if index.startswith("katz") and phi is None:
            phi = KATZ_PHI
        return cls(index, phi, pc, s[pc[:, 0], pc[:, 1]], pd, s[pd[:, 0], pd[:, 1]])

    def to_csv(self, stream: TextIO) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["u", "v", "score", "class"])
        for cls_, pairs, scores in (("c", self.pairs_connected, self.scores_connected),
                                    ("d", self.pairs_unconnected, self.scores_unconnected)):
            for (u, v), s in zip(pairs.tolist(), scores.tolist()):
                w.writerow([u, v, repr(s), cls_])


def score_lp(graph: Graph, phi: float = LP_PHI) -> ScoreTable:
    return ScoreTable.build(graph, "lp", phi, lp_matrix(graph, phi))


def score_katz(graph: Graph, phi: float = KATZ_PHI) -> ScoreTable:
    return ScoreTable.build(graph, "katz", phi, katz_matrix(graph, phi))


def katz_connected_shift(p_c: Pmf, phi: float = KATZ_PHI) -> Pmf:
    """Remove the direct link's own ``phi`` from connected-pair Katz scores."""
    return p_c.shift(-phi)
