"""Link-prediction accuracy: split experiments and the distribution-based theory.

The experimental side removes a random fraction of links, scores the training
graph and measures AUC and Precision. The theoretical side needs only the
score distributions of connected and unconnected pairs of the original graph.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cns import ClassCondDistributions, Pmf, _snap, aligned, empirical_class_distributions
from .graph import Graph
from .indices import INDICES, KATZ_PHI, LP_PHI, katz_connected_shift, score_matrix

TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SplitSpec:
    epsilon: float = 0.1
    seed: int = 0
    repetitions: int = 100

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")

    def test_size(self, num_edges: int) -> int:
        # guard against 0.1 * 5480 evaluating to 548.0000000001
        return math.ceil(round(self.epsilon * num_edges, 9))


def split(graph: Graph, spec: SplitSpec, repetition: int) -> tuple[Graph, np.ndarray]:
    """Move ``ceil(epsilon * |E|)`` uniformly chosen links into a test set."""
    size = spec.test_size(graph.num_edges)
    if size == 0:
        raise ValueError("test set would be empty")
    rng = np.random.default_rng([spec.seed, repetition])
    pick = np.sort(rng.choice(graph.num_edges, size=size, replace=False))
    test = graph.edges[pick]
    return graph.without_edges(test), test


def _pair_key(pairs: np.ndarray, n: int) -> np.ndarray:
    p = np.sort(np.asarray(pairs, dtype=np.int64).reshape(-1, 2), axis=1)
    return p[:, 0] * n + p[:, 1]


def _resolve_scores(training: Graph, index, scores):
    if scores is not None:
        return scores
    return score_matrix(training, index)


def _tie_cmp(x: np.ndarray, y: np.ndarray, rtol: float = TIE_RTOL) -> np.ndarray:
    """Sign of x - y with near-equal values counted as ties."""
    tie = np.abs(x - y) <= rtol * np.maximum(np.abs(x), np.abs(y))
    return np.where(tie, 0, np.sign(x - y))


def sample_never_connected(training: Graph, test: np.ndarray, size: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Uniform pairs that are linked neither in the training graph nor in the test set."""
    n = training.n
    forbidden = np.concatenate([_pair_key(training.edges, n), _pair_key(test, n)])
    forbidden.sort()
    if len(np.unique(forbidden)) >= n * (n - 1) // 2:
        raise ValueError("no never-connected pairs exist")
    out = []
    have = 0
    while have < size:
        u = rng.integers(n, size=2 * (size - have) + 16)
        v = rng.integers(n, size=len(u))
        ok = u != v
        u, v = u[ok], v[ok]
        key = np.minimum(u, v) * n + np.maximum(u, v)
        k = np.searchsorted(forbidden, key)
        k[k == len(forbidden)] = 0
        ok = forbidden[k] != key
        batch = np.column_stack([u[ok], v[ok]])
        out.append(batch)
        have += len(batch)
    return np.concatenate(out)[:size]


def auc_experimental(training: Graph, test: np.ndarray, index: str = "cn",
                     n_comparisons: int = 10_000, seed: int = 0,
                     scores: np.ndarray | None = None) -> float:
    """(n' + n''/2) / n over random (missing link, non-link) comparisons."""
    test = np.asarray(test).reshape(-1, 2)
    if not len(test):
        raise ValueError("empty test set")
    s = _resolve_scores(training, index, scores)
    rng = np.random.default_rng(seed)
    miss = test[rng.integers(len(test), size=n_comparisons)]
    non = sample_never_connected(training, test, n_comparisons, rng)
    c = _tie_cmp(s[miss[:, 0], miss[:, 1]], s[non[:, 0], non[:, 1]])
    return float((np.count_nonzero(c > 0) + 0.5 * np.count_nonzero(c == 0)) / n_comparisons)


def auc_from_counts(n: int, n_greater: int, n_equal: int) -> float:
    return (n_greater + 0.5 * n_equal) / n


def training_candidates(training: Graph, test: np.ndarray):
    """Row/column indices of the training graph's non-links and which are held out."""
    n = training.n
    iu, ju = np.triu_indices(n, k=1)
    linked = training.adjacency(np.int8).toarray().astype(bool)
    held = np.zeros((n, n), dtype=bool)
    t = np.asarray(test, dtype=np.int64).reshape(-1, 2)
    held[t[:, 0], t[:, 1]] = held[t[:, 1], t[:, 0]] = True
    keep = ~linked[iu, ju]
    iu, ju = iu[keep], ju[keep]
    return iu, ju, held[iu, ju]


def expected_top_precision(scores: np.ndarray, positive: np.ndarray, L: int,
                           rtol: float = TIE_RTOL) -> float:
    """Expected share of positives in the top ``L`` when ties are broken uniformly."""
    if not 1 <= L <= len(scores):
        raise ValueError("L must lie in [1, number of candidate pairs]")
    v = _snap(np.asarray(scores, dtype=float), rtol)
    order = np.argsort(-v, kind="stable")
    v, pos = v[order], np.asarray(positive)[order]
    cut = v[L - 1]
    above = v > cut
    tied = v == cut
    n_above = int(np.count_nonzero(above))
    hits = np.count_nonzero(pos & above)
    n_tied = int(np.count_nonzero(tied))
    hits_tied = np.count_nonzero(pos & tied)
    return float((hits + (L - n_above) * hits_tied / n_tied) / L)


def precision_experimental(training: Graph, test: np.ndarray, index: str = "cn",
                           L: int | None = None, scores: np.ndarray | None = None,
                           candidates=None) -> float:
    """Share of held-out links among the ``L`` highest-scored non-links of the training graph."""
    test = np.asarray(test).reshape(-1, 2)
    L = len(test) if L is None else L
    s = _resolve_scores(training, index, scores)
    iu, ju, pos = training_candidates(training, test) if candidates is None else candidates
    return expected_top_precision(s[iu, ju], pos, L)


# -- theory --------------------------------------------------------------------

def class_score_distributions(graph: Graph, index: str = "cn", phi: float | None = None,
                              rtol: float = TIE_RTOL) -> ClassCondDistributions:
    """Score distributions of connected and unconnected pairs of ``graph`` itself.

    ``katz-shifted`` moves the connected-pair distribution down by ``phi``.
    """
    index = index.lower()
    if graph.num_edges == 0:
        raise ValueError("graph has no connected pairs")
    if index == "cn":
        out = empirical_class_distributions(graph)
    else:
        s = score_matrix(graph, index, phi)
        iu, ju = np.triu_indices(graph.n, k=1)
        vals = _snap(s[iu, ju], rtol)
        a = graph.adjacency().toarray().astype(bool)
        conn = a[iu, ju]
        p_c = Pmf.from_values(vals[conn])
        p_d = Pmf.from_values(vals[~conn]) if np.any(~conn) else None
        out = ClassCondDistributions(Pmf.from_values(vals), p_c, p_d,
                                     chi_c=graph.mean_degree / (graph.n - 1))
        if index == "katz-shifted":
            out.p_c = katz_connected_shift(p_c, KATZ_PHI if phi is None else phi)
            out.meta["shifted"] = True
    out.meta["index"] = index
    return out


def auc_theoretical(p_c: Pmf, p_d: Pmf) -> float:
    """P(connected score > unconnected score) + P(equal) / 2.

    Evaluated as ``1/2 + (P(c > d) - P(c < d)) / 2``; the two terms are computed
    the same way, so identical inputs give exactly one half.
    """
    grid, c, d = aligned(p_c, p_d)
    below_d = np.concatenate([[0.0], np.cumsum(d)[:-1]])
    below_c = np.concatenate([[0.0], np.cumsum(c)[:-1]])
    return float(0.5 + 0.5 * (np.dot(c, below_d) - np.dot(d, below_c)))


@dataclass(frozen=True)
class PrecisionTheory:
    exact: float
    loose: float
    threshold: float
    loose_above: float


def precision_theoretical(p_c: Pmf, p_d: Pmf, n: int, mean_degree: float,
                          epsilon: float, L: int) -> PrecisionTheory:
    """Expected Precision of the top ``L`` pairs from class score distributions.

    Expected counts of held-out links and never-linked pairs at each score are
    accumulated from the top. The threshold ``x_L`` is the score at which the
    cumulative count first reaches ``L``; the boundary bin contributes
    pro rata. ``loose`` is the plain ratio of cumulative counts at ``x_L``.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    grid, c, d = aligned(p_c, p_d)
    wc = epsilon * n * mean_degree / 2.0 * c[::-1]
    wd = n * (n - 1 - mean_degree) / 2.0 * d[::-1]
    phi_c = np.cumsum(wc)
    phi = np.cumsum(wc + wd)
    if L > phi[-1] * (1 + 1e-12):
        raise ValueError(f"L={L} exceeds the expected number of unconnected pairs {phi[-1]:.6g}")
    k = min(int(np.searchsorted(phi, L * (1 - 1e-15), side="left")), len(phi) - 1)
    above_c = phi_c[k - 1] if k else 0.0
    above = phi[k - 1] if k else 0.0
    exact = (above_c + wc[k] * (L - above) / (wc[k] + wd[k])) / L
    loose = phi_c[k] / phi[k]
    loose_above = above_c / above if above > 0 else loose
    return PrecisionTheory(float(exact), float(loose), grid[::-1][k].item(), float(loose_above))


def median_distance(p_c: Pmf, p_d: Pmf) -> tuple[float, float, float]:
    xc, xd = p_c.median(), p_d.median()
    return xc, xd, xc - xd


# -- reports -------------------------------------------------------------------

@dataclass
class IndexResult:
    experimental_auc: Optional[float] = None
    experimental_auc_std: Optional[float] = None
    theoretical_auc: Optional[float] = None
    experimental_precision: Optional[float] = None
    experimental_precision_std: Optional[float] = None
    theoretical_precision: Optional[float] = None
    loose_precision: Optional[float] = None
    xi_c: Optional[float] = None
    xi_d: Optional[float] = None
    median_distance: Optional[float] = None


@dataclass
class EvalReport:
    nodes: int
    links: int
    isolated: int
    results: dict[str, IndexResult] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    ROWS = (("Experimental AUC", "experimental_auc"),
            ("Theoretical AUC", "theoretical_auc"),
            ("Experimental Precision", "experimental_precision"),
            ("Theoretical Precision", "theoretical_precision"))

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "links": self.links, "isolated": self.isolated,
                "config": self.config,
                "results": {k: asdict(v) for k, v in self.results.items()}}

    def to_table(self, title: str = "network") -> str:
        names = list(self.results)
        lines = [f"{title} (nodes: {self.nodes}, links: {self.links})",
                 "Performance".ljust(24) + "".join(n.upper().rjust(14) for n in names)]
        for label, attr in self.ROWS:
            cells = []
            for name in names:
                v = getattr(self.results[name], attr)
                cells.append(("-" if v is None else f"{v:.3f}").rjust(14))
            lines.append(label.ljust(24) + "".join(cells))
        return "\n".join(lines) + "\n"


def _check_indices(indices: Sequence[str]) -> list[str]:
    out = []
    for name in indices:
        name = name.strip().lower()
        if name not in INDICES:
            raise ValueError(f"unknown index {name!r}; valid indices: {', '.join(INDICES)}")
        out.append(name)
    return out


def _phi_for(index: str, phi_lp: float, phi_katz: float):
    if index == "lp":
        return phi_lp
    if index.startswith("katz"):
        return phi_katz
    return None


def evaluate(graph: Graph, indices: Sequence[str] = ("cn", "ra", "aa", "lp", "katz"),
             spec: SplitSpec = SplitSpec(), n_comparisons: int = 10_000,
             theory_only: bool = False, experiment_only: bool = False,
             phi_lp: float = LP_PHI, phi_katz: float = KATZ_PHI) -> EvalReport:
    """Experimental and theoretical AUC/Precision for each index on ``graph``."""
    indices = _check_indices(indices)
    report = EvalReport(graph.n, graph.num_edges, graph.isolated_count())
    report.config = {"indices": indices, "epsilon": spec.epsilon, "seed": spec.seed,
                     "repetitions": spec.repetitions, "n_comparisons": n_comparisons,
                     "phi_lp": phi_lp, "phi_katz": phi_katz, "theory_only": theory_only}
    for name in indices:
        report.results[name] = IndexResult()
    L = spec.test_size(graph.num_edges)

    if not experiment_only:
        for name in indices:
            dist = class_score_distributions(graph, name, _phi_for(name, phi_lp, phi_katz))
            r = report.results[name]
            r.theoretical_auc = auc_theoretical(dist.p_c, dist.p_d)
            pt = precision_theoretical(dist.p_c, dist.p_d, graph.n, graph.mean_degree,
                                       spec.epsilon, L)
            r.theoretical_precision, r.loose_precision = pt.exact, pt.loose
            r.xi_c, r.xi_d, r.median_distance = median_distance(dist.p_c, dist.p_d)

    if not theory_only:
        aucs = {name: [] for name in indices}
        precs = {name: [] for name in indices}
        for rep in range(spec.repetitions):
            training, test = split(graph, spec, rep)
            cache: dict[str, np.ndarray] = {}
            cands = training_candidates(training, test)
            for name in indices:
                base = "katz" if name.startswith("katz") else name
                if base not in cache:
                    cache[base] = score_matrix(training, base, _phi_for(base, phi_lp, phi_katz))
                s = cache[base]
                aucs[name].append(auc_experimental(training, test, base, n_comparisons,
                                                   seed=[spec.seed, rep, 1], scores=s))
                precs[name].append(precision_experimental(training, test, base, L, scores=s,
                                                          candidates=cands))
        for name in indices:
            r = report.results[name]
            r.experimental_auc = float(np.mean(aucs[name]))
            r.experimental_auc_std = float(np.std(aucs[name]))
            r.experimental_precision = float(np.mean(precs[name]))
            r.experimental_precision_std = float(np.std(precs[name]))
    return report


def report_json(report: EvalReport) -> str:
    return json.dumps(report.to_json(), indent=2)
