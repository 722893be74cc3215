"""Immutable undirected simple graphs, edge-list ingestion and common-neighbor counts."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np
from scipy import sparse


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on dense node ids ``0..n-1``.

    Adjacency is stored in CSR form with sorted neighbor lists. Build with
    :meth:`from_edges`, which drops self-loops and merges duplicates.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    edges: np.ndarray  # (E, 2), u < v, lexicographically sorted
    labels: tuple | None = field(default=None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] | np.ndarray,
                   labels: Sequence | None = None) -> "Graph":
        n = int(n)
        if n < 0:
            raise ValueError("node count must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        if e.size:
            e = np.unique(e, axis=0)
        both = np.concatenate([e, e[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n) if n else np.zeros(0, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, _readonly(indptr), _readonly(both[:, 1].copy()), _readonly(e),
                   tuple(labels) if labels is not None else None)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def mean_degree(self) -> float:
        return 2.0 * self.num_edges / self.n if self.n else 0.0

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def neighbors(self, u: int) -> np.ndarray:
        self._check(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self.indptr[u + 1] - self.indptr[u])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        self._check(v)
        k = np.searchsorted(nb, v)
        return bool(k < len(nb) and nb[k] == v)

    def isolated_count(self) -> int:
        return int(np.count_nonzero(self.degrees == 0))

    def adjacency(self, dtype=np.float64) -> sparse.csr_matrix:
        data = np.ones(len(self.indices), dtype=dtype)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def without_edges(self, removed: np.ndarray) -> "Graph":
        """Same node set, with the given (u, v) edges removed."""
        removed = np.sort(np.asarray(removed, dtype=np.int64).reshape(-1, 2), axis=1)
        key = self.edges[:, 0] * self.n + self.edges[:, 1]
        drop = removed[:, 0] * self.n + removed[:, 1]
        keep = ~np.isin(key, drop)
        return Graph.from_edges(self.n, self.edges[keep], self.labels)

    def _check(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise IndexError(f"node id {u} out of range for n={self.n}")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass(frozen=True)
class NodeSet:
    members: tuple[int, ...]

    @classmethod
    def of(cls, members: Iterable[int], n: int | None = None) -> "NodeSet":
        ms = tuple(sorted(int(v) for v in members))
        if not ms:
            raise ValueError("node set must contain at least one node")
        if len(set(ms)) != len(ms):
            raise ValueError("node set members must be distinct")
        if ms[0] < 0 or (n is not None and ms[-1] >= n):
            raise IndexError(f"node set {ms} out of range for n={n}")
        return cls(ms)

    @property
    def q(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _as_nodeset(nodes, n: int) -> NodeSet:
    if isinstance(nodes, NodeSet):
        if nodes.members[-1] >= n or nodes.members[0] < 0:
            raise IndexError(f"node set {nodes.members} out of range for n={n}")
        return nodes
    return NodeSet.of(nodes, n)


def cns(graph: Graph, nodes: NodeSet | Iterable[int]) -> int:
    """Number of nodes outside ``nodes`` adjacent to every member.

    For a single node this is its degree.
    """
    ns = _as_nodeset(nodes, graph.n)
    common = graph.neighbors(ns.members[0])
    for v in ns.members[1:]:
        common = np.intersect1d(common, graph.neighbors(v), assume_unique=True)
        if not len(common):
            return 0
    if ns.q > 1:
        common = np.setdiff1d(common, ns.members, assume_unique=True)
    return int(len(common))


def pair_arrays(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """All unordered pairs split into connected and unconnected, as (k, 2) arrays."""
    iu, ju = np.triu_indices(graph.n, k=1)
    key = iu.astype(np.int64) * graph.n + ju
    ekey = graph.edges[:, 0] * graph.n + graph.edges[:, 1]
    conn = np.isin(key, ekey, assume_unique=True)
    pairs = np.column_stack([iu, ju]).astype(np.int64)
    return pairs[conn], pairs[~conn]


def pair_classes(graph: Graph) -> tuple[Iterator[tuple[int, int]], Iterator[tuple[int, int]]]:
    """Iterators over connected and unconnected unordered pairs (u < v)."""

    def connected():
        for u, v in graph.edges:
            yield int(u), int(v)

    def unconnected():
        for u in range(graph.n):
            nb = graph.neighbors(u)
            k = np.searchsorted(nb, u + 1)
            nxt = nb[k:]
            p = 0
            for v in range(u + 1, graph.n):
                if p < len(nxt) and nxt[p] == v:
                    p += 1
                    continue
                yield u, v

    return connected(), unconnected()


def load_edge_list(stream: TextIO | str | Iterable[str], *, comments: str = "#%") -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with a comment character are skipped, as are blank lines.
    Tokens beyond the first two (weights, timestamps) are ignored. Directions
    are dropped, self-loops removed and duplicate links merged. Node labels are
    assigned dense ids in order of first appearance; self-loop-only nodes are
    kept as isolated nodes.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    label_to_id: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in comments:
            continue
        toks = line.split()
        if len(toks) < 2:
            raise EdgeListParseError(f"expected two node tokens, got {line!r}", lineno)
        try:
            a, b = int(toks[0]), int(toks[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer node token in {line!r}", lineno) from None
        ids = []
        for lab in (a, b):
            if lab not in label_to_id:
                label_to_id[lab] = len(label_to_id)
            ids.append(label_to_id[lab])
        edges.append((ids[0], ids[1]))
    if not label_to_id:
        raise EdgeListParseError("edge list contains no edges")
    return Graph.from_edges(len(label_to_id), edges, labels=list(label_to_id))


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        return load_edge_list(fh)


def write_edge_list(graph: Graph, stream: TextIO) -> None:
    for u, v in graph.edges:
        stream.write(f"{u} {v}\n")


def write_label_map(graph: Graph, stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["original_label", "dense_id"])
    labels = graph.labels if graph.labels is not None else range(graph.n)
    for i, lab in enumerate(labels):
        w.writerow([lab, i])


def fit_degree_exponent(degrees: np.ndarray, kmin: int | None = None) -> float:
    """Maximum-likelihood power-law exponent of the degree tail ``k >= kmin``.

    Uses the discrete approximation ``1 + n / sum(log(k / (kmin - 1/2)))``.
    With ``kmin=None`` the cutoff minimizing the Kolmogorov-Smirnov distance
    between the tail and the fitted law is chosen.
    """
    k = np.asarray(degrees, dtype=float)
    k = k[k > 0]

    def fit(kmin):
        tail = k[k >= kmin]
        return 1.0 + len(tail) / np.sum(np.log(tail / (kmin - 0.5))), tail

    if kmin is not None:
        return float(fit(kmin)[0])
    best = (np.inf, np.nan)
    cands = np.unique(k)
    for km in cands[:-1]:
        a, tail = fit(km)
        if len(tail) < 50:
            break
        xs = np.sort(tail)
        emp = np.arange(1, len(xs) + 1) / len(xs)
        model = 1.0 - (xs / km) ** (1.0 - a)
        d = np.max(np.abs(emp - model))
        if d < best[0]:
            best = (d, a)
    return float(best[1])
