"""Weighted undirected graphs, Laplacians and component queries.

Nodes are the integers ``0..n-1``. Links are stored once, as sorted pairs
``(i, j)`` with ``i < j``, in lexicographic order; every per-link array in
the package is aligned with :attr:`WeightedGraph.links`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DuplicateLink, IndexOutOfRange, LinkNotFound, NonpositiveWeight, SelfLoop


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable simple graph with positive link weights.

    Use :func:`build_graph` rather than the constructor; it validates and
    canonicalizes the input.
    """

    n: int
    links: np.ndarray  # (m, 2) int, i < j, lexicographically sorted
    weights: np.ndarray  # (m,) float, > 0
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.links.setflags(write=False)
        self.weights.setflags(write=False)
        if not self._index:
            self._index.update({(int(i), int(j)): k for k, (i, j) in enumerate(self.links)})

    @property
    def m(self) -> int:
        return len(self.weights)

    def link_index(self, i: int, j: int) -> int:
        """Position of link ``(i, j)`` in :attr:`links` (order of ``i, j`` is irrelevant)."""
        key = (min(i, j), max(i, j))
        try:
            return self._index[key]
        except KeyError:
            raise LinkNotFound(f"link {key} not in graph") from None

    def has_link(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._index

    def weight(self, i: int, j: int) -> float:
        return float(self.weights[self.link_index(i, j)])

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric weighted adjacency matrix in CSR form."""
        i, j = self.links[:, 0], self.links[:, 1]
        data = np.concatenate([self.weights, self.weights])
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degrees(self) -> np.ndarray:
        """Combinatorial degrees d_i."""
        return np.bincount(self.links.ravel(), minlength=self.n)

    @cached_property
    def weighted_degrees(self) -> np.ndarray:
        """Weighted degrees k_i."""
        k = np.zeros(self.n)
        np.add.at(k, self.links[:, 0], self.weights)
        np.add.at(k, self.links[:, 1], self.weights)
        return k

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def edge_list(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(c)) for (i, j), c in zip(self.links, self.weights)]

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, m={self.m})"


def build_graph(edge_list, n: int | None = None) -> WeightedGraph:
    """Build a validated graph from ``(i, j, weight)`` triples.

    Pairs ``(i, j)`` get weight 1.

    ``n`` defaults to one more than the largest index seen. Repeated links
    with the same weight are merged; a repeated link with a different weight
    raises :class:`DuplicateLink`.
    """
    seen: dict[tuple[int, int], float] = {}
    top = -1
    for item in edge_list:
        i, j = int(item[0]), int(item[1])
        c = float(item[2]) if len(item) > 2 else 1.0
        if i == j:
            raise SelfLoop(f"self-loop at node {i}")
        if not c > 0 or not np.isfinite(c):
            raise NonpositiveWeight(f"link ({i}, {j}) has weight {c}")
        if i < 0 or j < 0 or (n is not None and max(i, j) >= n):
            raise IndexOutOfRange(f"link ({i}, {j}) outside [0, {n})")
        key = (min(i, j), max(i, j))
        if key in seen and seen[key] != c:
            raise DuplicateLink(f"link {key} given with weights {seen[key]} and {c}")
        seen[key] = c
        top = max(top, i, j)
    if n is None:
        n = top + 1
    keys = sorted(seen)
    links = np.array(keys, dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[k] for k in keys], dtype=float)
    return WeightedGraph(int(n), links, weights)


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Dense Laplacian Q = diag(k) - C."""
    q = -g.adjacency.toarray()
    q[np.diag_indices(g.n)] = g.weighted_degrees
    return q


def laplacian_sparse(g: WeightedGraph) -> sparse.csr_matrix:
    k = sparse.diags(g.weighted_degrees)
    return (k - g.adjacency).tocsr()


@dataclass(frozen=True)
class ComponentInfo:
    beta: int
    labels: np.ndarray

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)


def components(g: WeightedGraph) -> ComponentInfo:
    beta, labels = csgraph.connected_components(g.adjacency, directed=False)
    return ComponentInfo(int(beta), labels)


def _count_components(n: int, links: np.ndarray, keep_nodes: np.ndarray | None = None) -> int:
    if keep_nodes is None:
        keep_nodes = np.ones(n, dtype=bool)
    remap = -np.ones(n, dtype=np.int64)
    remap[keep_nodes] = np.arange(keep_nodes.sum())
    ok = keep_nodes[links[:, 0]] & keep_nodes[links[:, 1]] if len(links) else np.zeros(0, bool)
    sub = links[ok]
    size = int(keep_nodes.sum())
    if size == 0:
        return 0
    adj = sparse.coo_matrix(
        (np.ones(len(sub)), (remap[sub[:, 0]], remap[sub[:, 1]])), shape=(size, size)
    )
    return int(csgraph.connected_components(adj, directed=False)[0])


def is_cut_link(g: WeightedGraph, link) -> bool:
    """True iff deleting ``link`` increases the number of components."""
    k = g.link_index(*link)
    rest = np.delete(g.links, k, axis=0)
    return _count_components(g.n, rest) > _count_components(g.n, g.links)


def removal_components(g: WeightedGraph, nodes) -> int:
    """Number of components after deleting ``nodes`` and their links."""
    keep = np.ones(g.n, dtype=bool)
    keep[list(nodes)] = False
    return _count_components(g.n, g.links, keep)


def link_removal_components(g: WeightedGraph, link) -> int:
    """Number of components after deleting a single link."""
    k = g.link_index(*link)
    return _count_components(g.n, np.delete(g.links, k, axis=0))


def subgraph(g: WeightedGraph, nodes) -> tuple[WeightedGraph, np.ndarray]:
    """Induced subgraph on ``nodes`` relabelled to ``0..len(nodes)-1``.

    Returns the subgraph and the array of original node ids.
    """
    nodes = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
    remap = -np.ones(g.n, dtype=np.int64)
    remap[nodes] = np.arange(len(nodes))
    ok = (remap[g.links[:, 0]] >= 0) & (remap[g.links[:, 1]] >= 0)
    edges = [(remap[i], remap[j], c) for (i, j), c in zip(g.links[ok], g.weights[ok])]
    return build_graph(edges, n=len(nodes)), nodes


def with_link(g: WeightedGraph, i: int, j: int, c: float) -> WeightedGraph:
    """New graph with link ``(i, j)`` added (or its weight replaced)."""
    edges = {(a, b): w for a, b, w in g.edge_list()}
    edges[(min(i, j), max(i, j))] = float(c)
    return build_graph([(a, b, w) for (a, b), w in edges.items()], n=g.n)


def from_laplacian(q: np.ndarray, tol: float = 0.0) -> WeightedGraph:
    """Graph whose Laplacian is ``q``; off-diagonals must be <= tol."""
    n = q.shape[0]
    iu, ju = np.triu_indices(n, 1)
    c = -q[iu, ju]
    mask = c > tol
    if np.any(c < -tol):
        raise NonpositiveWeight("matrix has positive off-diagonal entries")
    return build_graph(zip(iu[mask], ju[mask], c[mask]), n=n)
