"""Graph families with closed-form curvature, and random graph models.

Deterministic families: path, cycle, complete, star, complete bipartite,
regular trees, periodic lattices (square, triangular, hexagonal tori) and
the five platonic skeletons. Random models: uniform random trees,
Erdos-Renyi graphs and Euclidean random graphs on a disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import rng
from .errors import InvalidSize
from .graph import WeightedGraph, build_graph


def _weighted(pairs, c: float, n: int) -> WeightedGraph:
    return build_graph([(i, j, c) for i, j in pairs], n=n)


def path_graph(n: int, c: float = 1.0) -> WeightedGraph:
    if n < 1:
        raise InvalidSize("path needs n >= 1")
    return _weighted([(i, i + 1) for i in range(n - 1)], c, n)


def cycle_graph(n: int, c: float = 1.0) -> WeightedGraph:
    if n < 3:
        raise InvalidSize("cycle needs n >= 3")
    return _weighted([(i, (i + 1) % n) for i in range(n)], c, n)


def complete_graph(n: int, c: float = 1.0) -> WeightedGraph:
    if n < 1:
        raise InvalidSize("complete graph needs n >= 1")
    return _weighted([(i, j) for i in range(n) for j in range(i + 1, n)], c, n)


def star_graph(n: int, c: float = 1.0) -> WeightedGraph:
    """Star on ``n`` nodes; node 0 is the hub."""
    if n < 2:
        raise InvalidSize("star needs n >= 2")
    return _weighted([(0, j) for j in range(1, n)], c, n)


def complete_bipartite(a: int, b: int, c: float = 1.0) -> WeightedGraph:
    if a < 1 or b < 1:
        raise InvalidSize("both sides need at least one node")
    return _weighted([(i, a + j) for i in range(a) for j in range(b)], c, a + b)


def regular_tree(d: int, depth: int, c: float = 1.0) -> WeightedGraph:
    """Finite d-regular tree: every internal node has degree d."""
    if d < 2 or depth < 0:
        raise InvalidSize("regular tree needs d >= 2 and depth >= 0")
    pairs = []
    frontier, nxt = [0], 1
    for level in range(depth):
        new = []
        for v in frontier:
            for _ in range(d if level == 0 else d - 1):
                pairs.append((v, nxt))
                new.append(nxt)
                nxt += 1
        frontier = new
    return _weighted(pairs, c, nxt)


def square_torus(w: int, h: int, c: float = 1.0) -> WeightedGraph:
    """w x h periodic square lattice (4-regular)."""
    if w < 3 or h < 3:
        raise InvalidSize("torus sides must be >= 3 for a simple graph")
    idx = lambda x, y: (x % w) + w * (y % h)  # noqa: E731
    pairs = [(idx(x, y), idx(x + 1, y)) for x in range(w) for y in range(h)]
    pairs += [(idx(x, y), idx(x, y + 1)) for x in range(w) for y in range(h)]
    return _weighted(pairs, c, w * h)


def triangular_torus(size: int, c: float = 1.0) -> WeightedGraph:
    """Rhombic size x size periodic triangular lattice (6-regular).

    The rhombic cell keeps the hexagonal rotation symmetry, so the graph is
    node- and link-transitive.
    """
    if size < 4:
        raise InvalidSize("triangular torus needs size >= 4")
    idx = lambda a, b: (a % size) + size * (b % size)  # noqa: E731
    pairs = []
    for a in range(size):
        for b in range(size):
            for da, db in ((1, 0), (0, 1), (1, -1)):
                pairs.append((idx(a, b), idx(a + da, b + db)))
    return _weighted(pairs, c, size * size)


def hexagonal_torus(size: int, c: float = 1.0) -> WeightedGraph:
    """Honeycomb on a rhombic size x size cell (3-regular, 2 size^2 nodes)."""
    if size < 3:
        raise InvalidSize("hexagonal torus needs size >= 3")
    cell = lambda a, b: (a % size) + size * (b % size)  # noqa: E731
    n_cells = size * size
    pairs = []
    for a in range(size):
        for b in range(size):
            u = cell(a, b)
            # sublattice A = u, sublattice B = n_cells + u
            for da, db in ((0, 0), (-1, 0), (0, -1)):
                pairs.append((u, n_cells + cell(a + da, b + db)))
    return _weighted(pairs, c, 2 * n_cells)


_DODECA_LCF = (10, 7, 4, -4, -7, 10, -4, 7, -7, 4)
_ICOSA = {
    0: (1, 5, 7, 8, 11), 1: (2, 5, 6, 8), 2: (3, 6, 8, 9), 3: (4, 6, 9, 10),
    4: (5, 6, 10, 11), 5: (6, 11), 7: (8, 9, 10, 11), 8: (9,), 9: (10,), 10: (11,),
}


def platonic_graph(which: str, c: float = 1.0) -> WeightedGraph:
    """Skeleton of a platonic solid."""
    if which == "tetrahedron":
        return complete_graph(4, c)
    if which == "cube":
        pairs = [(v, v ^ (1 << b)) for v in range(8) for b in range(3) if v < v ^ (1 << b)]
        return _weighted(pairs, c, 8)
    if which == "octahedron":
        pairs = [(i, j) for i in range(6) for j in range(i + 1, 6) if j != i + 3]
        return _weighted(pairs, c, 6)
    if which == "dodecahedron":
        # Hamiltonian cycle plus LCF chords
        pairs = {tuple(sorted((i, (i + 1) % 20))) for i in range(20)}
        pairs |= {tuple(sorted((i, (i + _DODECA_LCF[i % 10]) % 20))) for i in range(20)}
        return _weighted(sorted(pairs), c, 20)
    if which == "icosahedron":
        return _weighted([(i, j) for i, js in _ICOSA.items() for j in js], c, 12)
    raise InvalidSize(f"unknown platonic solid {which!r}")


PLATONIC = ("tetrahedron", "cube", "octahedron", "dodecahedron", "icosahedron")


def make_family(kind: str, size=None, c: float = 1.0) -> WeightedGraph:
    """Named deterministic family with constant weight ``c``.

    ``size`` is an int for path, cycle, complete, star; ``(d, depth)`` for
    regular_tree; ``(w, h)`` for torus; an int for triangular_torus and
    hexagonal_torus; ``(a, b)`` for complete_bipartite; and the solid's
    name for platonic.
    """
    simple = {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph,
              "star": star_graph, "triangular_torus": triangular_torus,
              "hexagonal_torus": hexagonal_torus}
    if kind in simple:
        return simple[kind](int(size), c)
    if kind == "regular_tree":
        return regular_tree(int(size[0]), int(size[1]), c)
    if kind == "torus":
        return square_torus(int(size[0]), int(size[1]), c)
    if kind == "complete_bipartite":
        return complete_bipartite(int(size[0]), int(size[1]), c)
    if kind == "platonic":
        return platonic_graph(str(size), c)
    raise InvalidSize(f"unknown family {kind!r}")


def random_tree(n: int, seed: int, weights=None) -> WeightedGraph:
    """Uniform random labelled tree via a Pruefer sequence.

    ``weights`` is ``None`` (unit), or a ``(low, high)`` range for
    log-uniform random weights.
    """
    if n < 1:
        raise InvalidSize("tree needs n >= 1")
    gen = rng.generator(seed, 0x7)
    if n == 1:
        return build_graph([], n=1)
    if n == 2:
        pairs = [(0, 1)]
    else:
        seq = gen.integers(0, n, size=n - 2)
        degree = np.ones(n, dtype=int)
        np.add.at(degree, seq, 1)
        pairs = []
        for v in seq:
            leaf = int(np.flatnonzero(degree == 1)[0])
            pairs.append((leaf, int(v)))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = np.flatnonzero(degree == 1)
        pairs.append((int(u), int(w)))
    ws = _draw_weights(gen, len(pairs), weights)
    return build_graph([(i, j, c) for (i, j), c in zip(pairs, ws)], n=n)


def _draw_weights(gen, m, weights):
    if weights is None:
        return np.ones(m)
    lo, hi = weights
    return np.exp(gen.uniform(math.log(lo), math.log(hi), size=m))


def random_connected_graph(n: int, extra: int, seed: int, weights=(0.1, 10.0)) -> WeightedGraph:
    """Random tree plus ``extra`` random additional links (fewer if K_n fills up)."""
    tree = random_tree(n, seed)
    gen = rng.generator(seed, 0xC0)
    have = {(int(i), int(j)) for i, j in tree.links}
    free = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in have]
    k = min(extra, len(free))
    pick = gen.choice(len(free), size=k, replace=False) if k else []
    pairs = sorted(have) + [free[x] for x in pick]
    ws = _draw_weights(gen, len(pairs), weights)
    return build_graph([(i, j, c) for (i, j), c in zip(pairs, ws)], n=n)


def erdos_renyi(n: int, rho: float, seed: int) -> WeightedGraph:
    """G(n, rho) with unit weights."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    gen = rng.generator(seed, 0xE2)
    iu, ju = np.triu_indices(n, 1)
    keep = gen.random(len(iu)) < rho
    return build_graph(zip(iu[keep].tolist(), ju[keep].tolist()), n=n)


@dataclass(frozen=True)
class ErgConfig:
    """Euclidean random graph on a disc of radius ``R``.

    Nodes follow a Poisson point process with intensity N/(pi R^2); pairs
    within distance ``r`` are linked. ``fixed_n`` draws exactly
    ``round(N)`` points instead.
    """

    R: float
    r: float
    N: float
    seed: int = 0
    fixed_n: bool = False

    def __post_init__(self):
        if not (self.R > 0 and self.r > 0 and self.N > 0):
            raise ValueError("R, r and N must be positive")

    @property
    def intensity(self) -> float:
        return self.N / (math.pi * self.R**2)


def euclidean_random_graph(cfg: ErgConfig, key: int = 0):
    """Sample an ERG; returns ``(graph, positions, boundary_distances)``.

    ``key`` selects an independent stream for ensemble member ``key``.
    """
    gen = rng.generator(cfg.seed, 0xE26, key)
    n = int(round(cfg.N)) if cfg.fixed_n else int(gen.poisson(cfg.N))
    rad = cfg.R * np.sqrt(gen.random(n))
    ang = 2 * math.pi * gen.random(n)
    pos = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    pairs = cKDTree(pos).query_pairs(cfg.r, output_type="ndarray") if n > 1 else np.zeros((0, 2), int)
    g = build_graph(pairs.tolist(), n=n)
    return g, pos, cfg.R - np.hypot(pos[:, 0], pos[:, 1])
