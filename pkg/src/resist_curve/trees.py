"""Weighted random spanning trees (Wilson's algorithm) and tree counting.

A spanning tree T is drawn with probability proportional to the product of
its link weights. Disconnected graphs yield spanning forests: one
independent tree per component, each rooted at its smallest node.

Sampling runs in a numba kernel that consumes uniforms from a buffer filled
by a Philox stream, so results depend only on the seed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numba
import numpy as np

from . import rng
from .errors import Disconnected
from .graph import WeightedGraph, components, laplacian


@dataclass(frozen=True)
class SpanningTree:
    links: np.ndarray  # indices into g.links

    def degree(self, g: WeightedGraph) -> np.ndarray:
        return np.bincount(g.links[self.links].ravel(), minlength=g.n)


def tree_weight_total(g: WeightedGraph) -> float:
    """Sum over spanning trees of the product of weights (any cofactor of Q)."""
    if components(g).beta != 1:
        raise Disconnected("tree weight total is defined per connected component")
    if g.n == 1:
        return 1.0
    sign, logdet = np.linalg.slogdet(laplacian(g)[1:, 1:])
    return float(sign * math.exp(logdet))


def enumerate_spanning_trees(g: WeightedGraph):
    """All spanning trees of a connected graph, as ``(link_indices, weight)``.

    Brute force over (n-1)-subsets of links; intended for n <= 8.
    """
    n = g.n
    out = []
    for combo in itertools.combinations(range(g.m), n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        ok = True
        for k in combo:
            a, b = find(g.links[k, 0]), find(g.links[k, 1])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            out.append((combo, float(np.prod(g.weights[list(combo)]))))
    return out


@numba.njit(cache=True)
def _wilson_batch(indptr, nbrs, cumw, link_of, roots_mask, order, uniforms, n_samples, out):
    """Fill ``out[s]`` with link indices of tree s; returns samples completed.

    Stops early (returning the count) when the uniform buffer runs out.
    """
    n = len(indptr) - 1
    pos = 0
    n_u = len(uniforms)
    in_tree = np.zeros(n, dtype=np.bool_)
    nxt = np.zeros(n, dtype=np.int64)
    nxt_link = np.zeros(n, dtype=np.int64)
    for s in range(n_samples):
        for v in range(n):
            in_tree[v] = roots_mask[v]
        start_pos = pos
        filled = 0
        exhausted = False
        for idx in range(len(order)):
            u = order[idx]
            while not in_tree[u]:
                if pos >= n_u:
                    exhausted = True
                    break
                lo = indptr[u]
                hi = indptr[u + 1]
                target = uniforms[pos] * cumw[hi - 1]
                pos += 1
                k = lo
                while k < hi - 1 and cumw[k] <= target:
                    k += 1
                nxt[u] = nbrs[k]
                nxt_link[u] = link_of[k]
                u = nbrs[k]
            if exhausted:
                break
            u = order[idx]
            while not in_tree[u]:
                in_tree[u] = True
                out[s, filled] = nxt_link[u]
                filled += 1
                u = nxt[u]
        if exhausted:
            return s, start_pos
    return n_samples, pos


class TreeSampler:
    """Reusable Wilson sampler for one graph."""

    def __init__(self, g: WeightedGraph):
        self.g = g
        comp = components(g)
        self.beta = comp.beta
        a = g.adjacency.tocsr()
        a.sort_indices()
        self.indptr = a.indptr.astype(np.int64)
        self.nbrs = a.indices.astype(np.int64)
        # cumulative weights restart per row
        cw = np.empty(len(a.data))
        for v in range(g.n):
            lo, hi = self.indptr[v], self.indptr[v + 1]
            cw[lo:hi] = np.cumsum(a.data[lo:hi])
        self.cumw = cw
        link_of = np.empty(len(self.nbrs), dtype=np.int64)
        for v in range(g.n):
            for k in range(self.indptr[v], self.indptr[v + 1]):
                link_of[k] = g.link_index(v, int(self.nbrs[k]))
        self.link_of = link_of
        roots = np.zeros(g.n, dtype=np.bool_)
        for c in range(comp.beta):
            roots[comp.members(c).min()] = True
        self.roots = roots
        self.order = np.flatnonzero(~roots).astype(np.int64)
        self.size = g.n - comp.beta

    def sample(self, samples: int, seed: int) -> np.ndarray:
        """``(samples, n - beta)`` array of link indices, one row per tree."""
        out = np.zeros((samples, self.size), dtype=np.int64)
        if self.size == 0:
            return out
        gen = rng.generator(seed, 0x7EE)
        done = 0
        chunk = max(1024, samples * self.size * 4)
        leftover = np.zeros(0)
        while done < samples:
            buf = np.concatenate([leftover, gen.random(chunk)])
            got, used = _wilson_batch(
                self.indptr, self.nbrs, self.cumw, self.link_of, self.roots, self.order,
                buf, samples - done, out[done:],
            )
            done += got
            leftover = buf[used:]
            chunk *= 2
        return out


def sample_tree(g: WeightedGraph, seed: int) -> SpanningTree:
    """One weighted random spanning tree (forest, if disconnected)."""
    links = TreeSampler(g).sample(1, seed)[0]
    return SpanningTree(np.sort(links))


def inclusion_counts(g: WeightedGraph, samples: int, seed: int) -> np.ndarray:
    """How many of ``samples`` trees contain each link."""
    trees = TreeSampler(g).sample(samples, seed)
    return np.bincount(trees.ravel(), minlength=g.m)


def link_inclusion_frequency(g: WeightedGraph, link, samples: int, seed: int) -> float:
    k = g.link_index(*link)
    return float(inclusion_counts(g, samples, seed)[k] / samples)


def tree_degrees(g: WeightedGraph, trees: np.ndarray) -> np.ndarray:
    """``(samples, n)`` node degrees inside each sampled tree."""
    s = trees.shape[0]
    deg = np.zeros((s, g.n), dtype=np.int64)
    ends = g.links[trees]  # s x (n-beta) x 2
    rows = np.repeat(np.arange(s), ends.shape[1] * 2)
    np.add.at(deg, (rows, ends.reshape(-1)), 1)
    return deg


def expected_combinatorial_curvature(g: WeightedGraph, node: int, samples: int, seed: int) -> tuple[float, float]:
    """Mean of 1 - d_i(T)/2 over sampled trees, and its standard error."""
    trees = TreeSampler(g).sample(samples, seed)
    vals = 1.0 - tree_degrees(g, trees)[:, node] / 2.0
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return float(vals.mean()), se


def is_spanning_tree(g: WeightedGraph, link_idx) -> bool:
    """Acyclic, and spans each component with n_c - 1 links."""
    comp = components(g)
    link_idx = np.asarray(link_idx)
    if len(link_idx) != g.n - comp.beta or len(set(link_idx.tolist())) != len(link_idx):
        return False
    parent = list(range(g.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k in link_idx:
        a, b = find(g.links[k, 0]), find(g.links[k, 1])
        if a == b:
            return False
        parent[a] = b
    return True


def inclusion_report(g: WeightedGraph, samples: int, seed: int, relative=None) -> dict:
    """Per-link empirical inclusion vs relative resistance with 3-sigma flags."""
    from .resistance import effective_resistance

    if relative is None:
        relative = effective_resistance(g).relative
    counts = inclusion_counts(g, samples, seed)
    links = []
    for k, (i, j) in enumerate(g.links):
        q = float(relative[k])
        emp = counts[k] / samples
        sigma = math.sqrt(max(q * (1 - q), 0.0) / samples)
        ok = abs(emp - q) <= 3 * sigma + 1e-12
        links.append({"i": int(i), "j": int(j), "relative": q, "empirical": emp, "sigma": sigma, "pass": ok})
    return {"samples": samples, "seed": seed, "links": links, "all_pass": all(x["pass"] for x in links)}
