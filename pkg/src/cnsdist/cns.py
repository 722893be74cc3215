"""Common-neighbor similarity (CNS) distributions.

Analytic distributions come from multiplying out the generating function
``prod_t (1 - p_t + p_t x)`` with ``p_t`` the probability that node ``t`` is
adjacent to every member of a node set. Empirical distributions count common
neighbors on a concrete graph.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, TextIO

import numpy as np
from scipy import stats

from . import _kernels
from .graph import Graph, NodeSet
from .models import ProbModel

EPS = 1e-12


def _tree_sum(arrays: list[np.ndarray]) -> np.ndarray:
    """Pairwise summation of equally shaped arrays in a fixed order."""
    arrays = list(arrays)
    if not arrays:
        raise ValueError("nothing to sum")
    while len(arrays) > 1:
        nxt = [arrays[k] + arrays[k + 1] for k in range(0, len(arrays) - 1, 2)]
        if len(arrays) % 2:
            nxt.append(arrays[-1])
        arrays = nxt
    return arrays[0]


def _snap(values: np.ndarray, rtol: float) -> np.ndarray:
    """Replace values that agree within ``rtol`` by the smallest of their run."""
    if rtol <= 0 or len(values) == 0:
        return values
    order = np.argsort(values, kind="stable")
    sv = values[order]
    gap = np.diff(sv) > rtol * np.maximum(np.abs(sv[1:]), np.abs(sv[:-1]))
    starts = np.concatenate([[True], gap])
    rep = sv[np.maximum.accumulate(np.where(starts, np.arange(len(sv)), 0))]
    out = np.empty_like(values)
    out[order] = rep
    return out


@dataclass(frozen=True, eq=False)
class Pmf:
    """Finite distribution on a strictly increasing support.

    Zero-probability entries are pruned on construction.
    """

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support)
        p = np.asarray(self.probs, dtype=float)
        if s.shape != p.shape or s.ndim != 1:
            raise ValueError("support and probs must be 1-d and of equal length")
        if np.any(p < 0):
            raise ValueError("negative probability")
        keep = p > 0
        s, p = s[keep], p[keep]
        if len(s) == 0:
            raise ValueError("empty distribution")
        if np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        s.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "probs", p)

    # -- construction ------------------------------------------------------
    @classmethod
    def from_dense(cls, coeffs: np.ndarray, offset: int = 0) -> "Pmf":
        c = np.asarray(coeffs, dtype=float)
        idx = np.nonzero(c > 0)[0]
        return cls(idx + offset, c[idx])

    @classmethod
    def from_counts(cls, counts: np.ndarray, offset: int = 0) -> "Pmf":
        c = np.asarray(counts)
        total = c.sum()
        if total <= 0:
            raise ValueError("no observations")
        idx = np.nonzero(c)[0]
        return cls(idx + offset, c[idx] / total)

    @classmethod
    def from_values(cls, values: np.ndarray, weights: np.ndarray | None = None,
                    rtol: float = 0.0) -> "Pmf":
        v = _snap(np.asarray(values), rtol)
        u, inv = np.unique(v, return_inverse=True)
        w = np.bincount(inv, weights=weights, minlength=len(u))
        return cls(u, w / w.sum())

    @classmethod
    def point_mass(cls, x) -> "Pmf":
        return cls(np.array([x]), np.array([1.0]))

    # -- queries -------------------------------------------------------------
    @property
    def is_integer(self) -> bool:
        return np.issubdtype(self.support.dtype, np.integer)

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def var(self) -> float:
        mu = self.mean()
        return float(np.dot((self.support - mu) ** 2, self.probs))

    def prob(self, x) -> float:
        k = np.searchsorted(self.support, x)
        if k < len(self.support) and self.support[k] == x:
            return float(self.probs[k])
        return 0.0

    def cdf(self, x) -> float:
        """P(X <= x)."""
        k = np.searchsorted(self.support, x, side="right")
        return float(self.probs[:k].sum())

    def sf(self, x) -> float:
        """P(X >= x)."""
        k = np.searchsorted(self.support, x, side="left")
        return float(self.probs[k:].sum())

    def median(self):
        k = int(np.searchsorted(np.cumsum(self.probs), 0.5 - 1e-12))
        return self.support[min(k, len(self.support) - 1)].item()

    def dense(self, length: int | None = None) -> np.ndarray:
        if not self.is_integer:
            raise TypeError("dense form needs an integer support")
        if self.support[0] < 0:
            raise ValueError("dense form needs a nonnegative support")
        length = int(self.support[-1]) + 1 if length is None else length
        out = np.zeros(length)
        out[self.support] = self.probs
        return out

    def shift(self, delta) -> "Pmf":
        return Pmf(self.support + delta, self.probs)

    def total_variation(self, other: "Pmf") -> float:
        grid, a, b = aligned(self, other)
        return 0.5 * float(np.abs(a - b).sum())

    def items(self):
        return list(zip(self.support.tolist(), self.probs.tolist()))

    # -- io ------------------------------------------------------------------
    def to_csv(self, stream: TextIO) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["w", "probability"])
        for x, p in self.items():
            w.writerow([repr(x), repr(p)])

    @classmethod
    def from_csv(cls, stream: TextIO | str) -> "Pmf":
        if isinstance(stream, str):
            stream = io.StringIO(stream)
        rows = [r for r in csv.reader(line for line in stream if not line.startswith("#")) if r]
        body = rows[1:] if rows and rows[0][0] == "w" else rows
        xs = [r[0] for r in body]
        if all(_is_int(x) for x in xs):
            support = np.array([int(x) for x in xs], dtype=np.int64)
        else:
            support = np.array([float(x) for x in xs])
        return cls(support, np.array([float(r[1]) for r in body]))

    def __repr__(self) -> str:
        return f"Pmf(size={len(self.support)}, mean={self.mean():.6g})"


def _is_int(tok: str) -> bool:
    try:
        int(tok)
        return True
    except ValueError:
        return False


def aligned(*pmfs: Pmf) -> tuple[np.ndarray, ...]:
    """Merged support and each distribution's probabilities on it."""
    grid = pmfs[0].support
    for p in pmfs[1:]:
        grid = np.union1d(grid, p.support)
    out = [grid]
    for p in pmfs:
        v = np.zeros(len(grid))
        v[np.searchsorted(grid, p.support)] = p.probs
        out.append(v)
    return tuple(out)


def total_variation(a: Pmf, b: Pmf) -> float:
    return a.total_variation(b)


# -- generating-function expansion ---------------------------------------------

def _binomial_coeffs(k: int, p: float) -> np.ndarray:
    c = stats.binom.pmf(np.arange(k + 1), k, p)
    hi = len(c) - 1
    while hi > 0 and c[hi] < _kernels.TAIL:
        hi -= 1
    return c[:hi + 1]


def _pb_coeffs(p: np.ndarray) -> np.ndarray:
    """Coefficients of prod_t (1 - p_t + p_t x), indexed from 0."""
    ones = int(np.count_nonzero(p == 1.0))
    p = p[(p > 0) & (p < 1)]
    vals, counts = np.unique(p, return_counts=True)
    single = vals[counts == 1]
    pieces = []
    if len(single):
        pieces.append(_kernels.pb_dense(np.ascontiguousarray(single), _kernels.TAIL))
    for v, c in zip(vals[counts > 1], counts[counts > 1]):
        pieces.append(_binomial_coeffs(int(c), float(v)))
    out = np.ones(1)
    for piece in sorted(pieces, key=len):
        out = np.convolve(out, piece)
    if ones:
        out = np.concatenate([np.zeros(ones), out])
    return out


def poisson_binomial(probabilities: Iterable[float]) -> Pmf:
    """Distribution of the number of successes in independent Bernoulli trials."""
    p = np.asarray(list(probabilities) if not isinstance(probabilities, np.ndarray)
                   else probabilities, dtype=float).ravel()
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError("trial probabilities must lie in [0, 1]")
    return Pmf.from_dense(_pb_coeffs(p))


def common_neighbor_probs(model: ProbModel, nodes, eps: float = EPS) -> np.ndarray:
    """Probability that each outside node is adjacent to the whole set; tiny ones dropped."""
    ns = nodes if isinstance(nodes, NodeSet) else NodeSet.of(nodes, model.n)
    if ns.members[-1] >= model.n:
        raise IndexError("node set out of range")
    p = np.ones(model.n)
    for v in ns:
        p = p * model.gamma_row(v)
    p[list(ns.members)] = 0.0
    return p[p >= eps]


def set_cns_distribution(model: ProbModel, nodes, eps: float = EPS) -> Pmf:
    return poisson_binomial(common_neighbor_probs(model, nodes, eps))


def convolve(a: Pmf, b: Pmf) -> Pmf:
    """Distribution of the sum of independent draws from two count distributions."""
    if not (a.is_integer and b.is_integer):
        raise TypeError("convolution is defined for integer-valued distributions only")
    lo = int(a.support[0] + b.support[0])
    c = np.convolve(a.dense()[a.support[0]:], b.dense()[b.support[0]:])
    return Pmf.from_dense(c, offset=lo)


def convolution_identity(model: ProbModel, pair=(0, 1), eps: float = EPS) -> tuple[Pmf, Pmf]:
    """Both sides of the ring-model product approximation for one pair.

    For WS the pair distribution is compared with the MRL pair distribution
    convolved with a binomial over the far nodes; for NW the lattice part is
    the RRL pair distribution. The approximation drops the mixed-node factor
    ``(1 - eta alpha + eta alpha x)^(4m - 2s)``.
    """
    from .models import mrl, node_type_counts, rrl
    if model.kind not in ("ws", "nw"):
        raise ValueError("the product form holds for ws and nw models only")
    i, j = pair
    n, m, p = model.n, model.m, model.params["p"]
    lattice = mrl(n, m, p) if model.kind == "ws" else rrl(n, m)
    s, _, far = node_type_counts(i, j, n, m)
    lhs = set_cns_distribution(model, pair, eps)
    a2 = model.alpha ** 2
    er_part = (Pmf.point_mass(0) if far == 0 or a2 == 0
               else Pmf.from_dense(_binomial_coeffs(far, a2)))
    return lhs, convolve(set_cns_distribution(lattice, pair, eps), er_part)


def er_closed_form(n: int, mean_degree: float, q: int) -> Pmf:
    """Exact CNS distribution of a q-node set in an ER graph: Binomial(n-q, (k/(n-1))^q)."""
    if q < 1 or q > n:
        raise ValueError("q must lie in [1, n]")
    if not 0 <= mean_degree <= n - 1:
        raise ValueError("mean degree must lie in [0, n-1]")
    p = (mean_degree / (n - 1)) ** q
    if p in (0.0, 1.0):
        return Pmf.point_mass(int(round(p * (n - q))))
    return Pmf.from_dense(_binomial_coeffs(n - q, p))


def er_poisson_lambda(n: int, mean_degree: float, q: int) -> float:
    return mean_degree ** q * n ** (1 - q)


def poisson_pmf(lam: float, tail: float = 1e-17) -> Pmf:
    """Poisson(lam) truncated where the remaining upper tail drops below ``tail``."""
    k = np.arange(int(lam + 40 * math.sqrt(lam) + 40))
    c = stats.poisson.pmf(k, lam)
    c = c[:np.nonzero(c >= tail)[0][-1] + 1]
    return Pmf.from_dense(c / c.sum())


def er_poisson_approx(n: int, mean_degree: float, q: int) -> Pmf:
    return poisson_pmf(er_poisson_lambda(n, mean_degree, q))


# -- class-conditional distributions -------------------------------------------

@dataclass(eq=False)
class ClassCondDistributions:
    """Score distributions of connected, unconnected and all node sets.

    ``p_c``/``p_d`` are ``None`` when that class is empty (or for set sizes
    other than two). ``counts`` holds integer tallies for empirical results.
    """

    p_a: Pmf
    p_c: Optional[Pmf] = None
    p_d: Optional[Pmf] = None
    chi_c: Optional[float] = None
    q: int = 2
    counts: Optional[dict] = field(default=None, repr=False)
    meta: dict = field(default_factory=dict)

    def mixture_residual(self) -> float:
        if self.chi_c is None:
            return math.nan
        # an empty class carries zero weight
        present = [p for p in (self.p_a, self.p_c, self.p_d) if p is not None]
        grid, *vecs = aligned(*present)
        a = vecs.pop(0)
        c = vecs.pop(0) if self.p_c is not None else np.zeros_like(a)
        d = vecs.pop(0) if self.p_d is not None else np.zeros_like(a)
        return float(np.max(np.abs(a - self.chi_c * c - (1 - self.chi_c) * d)))

    def mixture_residual_exact(self) -> Fraction:
        """Max residual of the mixture identity in exact rational arithmetic (counts only)."""
        if self.counts is None:
            raise ValueError("exact residual needs integer counts")
        cc, cd = self.counts["c"], self.counts["d"]
        nc, nd = int(cc.sum()), int(cd.sum())
        total = nc + nd
        chi = Fraction(nc, total)
        worst = Fraction(0)
        for w in range(max(len(cc), len(cd))):
            c = int(cc[w]) if w < len(cc) else 0
            d = int(cd[w]) if w < len(cd) else 0
            pa = Fraction(c + d, total)
            pc = Fraction(c, nc) if nc else Fraction(0)
            pd = Fraction(d, nd) if nd else Fraction(0)
            worst = max(worst, abs(pa - chi * pc - (1 - chi) * pd))
        return worst

    def to_json(self) -> dict:
        def enc(p):
            return None if p is None else [list(t) for t in p.items()]
        return {"chi_c": self.chi_c, "q": self.q, "p_c": enc(self.p_c),
                "p_d": enc(self.p_d), "p_a": enc(self.p_a)}

    @classmethod
    def from_json(cls, obj: dict) -> "ClassCondDistributions":
        def dec(v):
            if v is None:
                return None
            s = [x for x, _ in v]
            dtype = np.int64 if all(isinstance(x, int) for x in s) else float
            return Pmf(np.array(s, dtype=dtype), np.array([p for _, p in v]))
        return cls(p_a=dec(obj["p_a"]), p_c=dec(obj["p_c"]), p_d=dec(obj["p_d"]),
                   chi_c=obj["chi_c"], q=obj.get("q", 2))


def _from_weighted(acc_a, acc_c, acc_d, total_pairs, sum_gamma) -> ClassCondDistributions:
    p_a = Pmf.from_dense(acc_a / total_pairs)
    sum_not = total_pairs - sum_gamma
    p_c = Pmf.from_dense(acc_c / sum_gamma) if sum_gamma > 0 else None
    p_d = Pmf.from_dense(acc_d / sum_not) if sum_not > 0 else None
    return ClassCondDistributions(p_a, p_c, p_d, chi_c=sum_gamma / total_pairs)


def _ring_pairs(model: ProbModel, eps: float) -> ClassCondDistributions:
    n = model.n
    cache: dict[bytes, list] = {}
    if model.kind == "er":
        dists = [(1, n * (n - 1) // 2)]
    else:
        dists = [(d, n // 2 if 2 * d == n else n) for d in range(1, n // 2 + 1)]
    for d, mult in dists:
        p = common_neighbor_probs(model, (0, d), eps)
        vals, cnt = np.unique(p, return_counts=True)
        key = vals.tobytes() + cnt.tobytes()
        g = model.gamma(0, d)
        if key not in cache:
            cache[key] = [_pb_coeffs(p), 0.0, 0.0]
        cache[key][1] += mult
        cache[key][2] += mult * g
    width = max(len(v[0]) for v in cache.values())

    def pad(c):
        out = np.zeros(width)
        out[:len(c)] = c
        return out

    entries = list(cache.values())
    acc_a = _tree_sum([pad(c) * m for c, m, _ in entries])
    acc_c = _tree_sum([pad(c) * mg for c, _, mg in entries])
    acc_d = _tree_sum([pad(c) * (m - mg) for c, m, mg in entries])
    total = n * (n - 1) // 2
    sum_gamma = sum(e[2] for e in entries)
    return _from_weighted(acc_a, acc_c, acc_d, total, sum_gamma)


def _matrix_pairs(model: ProbModel, eps: float) -> ClassCondDistributions:
    g = np.ascontiguousarray(model.gamma_matrix(), dtype=float)
    acc = _kernels.pair_class_accumulate(g, eps, _kernels.TAIL)
    acc_a, acc_c, acc_d = (_tree_sum(list(acc[k])) for k in range(3))
    total = model.n * (model.n - 1) // 2
    return _from_weighted(acc_a, acc_c, acc_d, total, float(np.triu(g, 1).sum()))


def _degree_distribution(model: ProbModel, eps: float) -> ClassCondDistributions:
    rows = []
    for i in range(model.n if not model.translation_invariant else 1):
        rows.append(_pb_coeffs(common_neighbor_probs(model, (i,), eps)))
    width = max(len(r) for r in rows)
    acc = _tree_sum([np.pad(r, (0, width - len(r))) for r in rows])
    return ClassCondDistributions(Pmf.from_dense(acc / len(rows)), q=1)


def _sampled_sets(model: ProbModel, q: int, sample_count: int, seed: int,
                  eps: float) -> ClassCondDistributions:
    rng = np.random.default_rng([seed, q])
    coeffs, weights = [], []
    for _ in range(sample_count):
        nodes = rng.choice(model.n, size=q, replace=False)
        coeffs.append(_pb_coeffs(common_neighbor_probs(model, nodes, eps)))
        weights.append(model.gamma(int(nodes[0]), int(nodes[1])) if q == 2 else 0.0)
    width = max(len(c) for c in coeffs)
    padded = [np.pad(c, (0, width - len(c))) for c in coeffs]
    acc_a = _tree_sum(padded)
    if q != 2:
        return ClassCondDistributions(Pmf.from_dense(acc_a / sample_count), q=q)
    acc_c = _tree_sum([c * w for c, w in zip(padded, weights)])
    acc_d = _tree_sum([c * (1 - w) for c, w in zip(padded, weights)])
    return _from_weighted(acc_a, acc_c, acc_d, sample_count, float(sum(weights)))


def class_distributions_analytic(model: ProbModel, q: int = 2, mode: str = "exact",
                                 sample_count: int = 100_000, seed: int = 0,
                                 eps: float = EPS) -> ClassCondDistributions:
    """CNS distributions of node sets of size ``q`` under ``model``.

    For pairs, connected and unconnected classes weight each pair's
    distribution by its connection probability and its complement. ``q=1``
    gives the degree distribution; ``q>2`` returns the all-sets distribution
    only, exact for ER and small ``n`` and otherwise by uniform sampling of
    node sets.
    """
    if q < 1 or q > model.n:
        raise ValueError("q must lie in [1, n]")
    if mode not in ("exact", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "sampled":
        if sample_count <= 0:
            raise ValueError("sampled mode needs sample_count > 0")
        if q == 1:
            raise ValueError("sampled mode needs q >= 2")
        out = _sampled_sets(model, q, sample_count, seed, eps)
    elif q == 1:
        out = _degree_distribution(model, eps)
    elif q == 2:
        out = _ring_pairs(model, eps) if model.translation_invariant else _matrix_pairs(model, eps)
    elif model.kind == "er":
        out = ClassCondDistributions(set_cns_distribution(model, range(q), eps), q=q)
    else:
        if math.comb(model.n, q) > 200_000:
            raise ValueError("too many node sets for exact enumeration; use mode='sampled'")
        coeffs = [_pb_coeffs(common_neighbor_probs(model, s, eps))
                  for s in combinations(range(model.n), q)]
        width = max(len(c) for c in coeffs)
        acc = _tree_sum([np.pad(c, (0, width - len(c))) for c in coeffs])
        out = ClassCondDistributions(Pmf.from_dense(acc / len(coeffs)), q=q)
    out.q = q
    out.meta.update({"source": "analytic", "mode": mode, "model": model.descriptor()})
    return out


# -- empirical -----------------------------------------------------------------

def cn_class_counts(graph: Graph, block_entries: int = 4_000_000) -> tuple[np.ndarray, np.ndarray]:
    """Histograms of common-neighbor counts over connected and unconnected pairs."""
    n = graph.n
    a = graph.adjacency(np.int32)
    hc = np.zeros(max(n - 1, 1), dtype=np.int64)
    hd = np.zeros(max(n - 1, 1), dtype=np.int64)
    step = max(1, block_entries // max(n, 1))
    cols = np.arange(n)
    for r0 in range(0, n, step):
        r1 = min(n, r0 + step)
        cn = (a[r0:r1] @ a).toarray()
        conn = a[r0:r1].toarray().astype(bool)
        upper = cols[None, :] > np.arange(r0, r1)[:, None]
        hc += np.bincount(cn[upper & conn], minlength=len(hc))[:len(hc)]
        hd += np.bincount(cn[upper & ~conn], minlength=len(hd))[:len(hd)]
    return hc, hd


def empirical_class_distributions(graph: Graph, q: int = 2, sample_count: int = 100_000,
                                  seed: int | None = None) -> ClassCondDistributions:
    """Observed CNS distributions of a graph.

    ``q=2`` counts every pair exactly; ``q=1`` is the degree distribution; larger
    sets are sampled uniformly (needs ``seed``).
    """
    if graph.n == 0:
        raise ValueError("empty graph")
    if q == 1:
        out = ClassCondDistributions(Pmf.from_counts(np.bincount(graph.degrees)), q=1)
    elif q == 2:
        if graph.n < 2:
            raise ValueError("need at least two nodes")
        hc, hd = cn_class_counts(graph)
        nc, nd = int(hc.sum()), int(hd.sum())
        out = ClassCondDistributions(
            Pmf.from_counts(hc + hd),
            Pmf.from_counts(hc) if nc else None,
            Pmf.from_counts(hd) if nd else None,
            chi_c=graph.mean_degree / (graph.n - 1),
            counts={"c": hc, "d": hd})
        if not nc:
            out.meta["warning"] = "no connected pairs: p_c undefined"
        if not nd:
            out.meta["warning"] = "no unconnected pairs: p_d undefined"
    else:
        if seed is None:
            raise ValueError("sampling node sets needs a seed")
        from .graph import cns
        rng = np.random.default_rng([seed, q])
        vals = [cns(graph, rng.choice(graph.n, size=q, replace=False)) for _ in range(sample_count)]
        out = ClassCondDistributions(Pmf.from_counts(np.bincount(vals)), q=q)
    out.meta.update({"source": "empirical", "n": graph.n, "edges": graph.num_edges,
                     "isolated": graph.isolated_count()})
    return out
