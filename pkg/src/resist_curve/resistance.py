"""Effective resistances: exact (dense, per component) and sketched.

The exact path factorizes each connected block of the Laplacian as
``(Q_c + J/n_c)^{-1} - J/n_c``. The approximate path projects the weighted
incidence matrix onto ``k = ceil(24 ln n / eps^2)`` random sign vectors and
solves the resulting Laplacian systems with Jacobi-preconditioned CG.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import rng
from .errors import SingularBlock, SolverDivergence
from .graph import WeightedGraph, components, laplacian, laplacian_sparse

EXACT_MAX_N = 2000


@dataclass(frozen=True)
class ApproxConfig:
    epsilon: float = 0.1
    seed: int = 0
    sketch_dim: int | None = None  # None -> ceil(24 ln n / eps^2)
    # CG residual tolerance; None -> eps^2/100. A residual of eps/10 is not
    # enough: CG underestimates resistances of weakly coupled links (a cut
    # link came out at 0.42 of its value), so the solve must be tighter than
    # the sketch.
    solver_rtol: float | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def dim(self, n: int) -> int:
        if self.sketch_dim is not None:
            return int(self.sketch_dim)
        return math.ceil(24 * math.log(max(n, 2)) / self.epsilon**2)

    def rtol(self) -> float:
        return self.solver_rtol if self.solver_rtol is not None else self.epsilon**2 / 100


@dataclass(frozen=True)
class ResistanceProfile:
    """Effective resistances of a graph.

    ``omega`` is the dense resistance matrix (``inf`` across components) and
    ``zeta`` the diagonal of the pseudoinverse; both are ``None`` for
    sketched profiles, which only carry per-link values. ``epsilon`` is 0
    for exact profiles and the requested accuracy otherwise.
    """

    n: int
    link_omega: np.ndarray
    relative: np.ndarray
    beta: int
    labels: np.ndarray
    omega: np.ndarray | None = None
    zeta: np.ndarray | None = None
    epsilon: float = 0.0

    @property
    def exact(self) -> bool:
        return self.epsilon == 0.0

    def same_component(self, i: int, j: int) -> bool:
        return self.labels[i] == self.labels[j]

    def block(self, c: int) -> tuple[np.ndarray, np.ndarray]:
        """Node ids of component ``c`` and its (finite) resistance block."""
        nodes = np.flatnonzero(self.labels == c)
        return nodes, self.omega[np.ix_(nodes, nodes)]


def pseudoinverse(q: np.ndarray, labels: np.ndarray | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a (generalized) Laplacian.

    Computed blockwise over connected components; ``labels`` may be passed
    when already known. Each block is inverted as ``(Q_c + J/n_c)^-1 - J/n_c``.
    """
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    if labels is None:
        from scipy.sparse import csgraph

        pattern = sparse.csr_matrix(np.abs(q - np.diag(np.diag(q))) > 0)
        _, labels = csgraph.connected_components(pattern, directed=False)
    out = np.zeros((n, n))
    for c in np.unique(labels):
        nodes = np.flatnonzero(labels == c)
        nc = len(nodes)
        if nc == 1:
            continue
        block = q[np.ix_(nodes, nodes)] + 1.0 / nc
        try:
            inv = np.linalg.inv(block)
        except np.linalg.LinAlgError as exc:
            raise SingularBlock(f"component {c} ({nc} nodes): {exc}") from None
        if not np.all(np.isfinite(inv)):
            raise SingularBlock(f"component {c}: non-finite inverse")
        inv -= 1.0 / nc
        out[np.ix_(nodes, nodes)] = 0.5 * (inv + inv.T)
    return out


def resistance_matrix(qdag: np.ndarray, labels: np.ndarray | None = None) -> np.ndarray:
    """Omega = u zeta^T + zeta u^T - 2 Q^dagger; ``inf`` across components."""
    z = np.diag(qdag)
    omega = z[:, None] + z[None, :] - 2 * qdag
    np.fill_diagonal(omega, 0.0)
    if labels is not None:
        omega[labels[:, None] != labels[None, :]] = np.inf
    return omega


def effective_resistance(g: WeightedGraph) -> ResistanceProfile:
    """Exact resistance profile for graphs with up to 2000 nodes."""
    if g.n > EXACT_MAX_N:
        raise ValueError(f"exact path limited to n <= {EXACT_MAX_N}; use approx_effective_resistance")
    comp = components(g)
    qdag = pseudoinverse(laplacian(g), comp.labels)
    omega = resistance_matrix(qdag, comp.labels)
    lw = omega[g.links[:, 0], g.links[:, 1]] if g.m else np.zeros(0)
    return ResistanceProfile(
        n=g.n,
        link_omega=lw,
        relative=g.weights * lw,
        beta=comp.beta,
        labels=comp.labels,
        omega=omega,
        zeta=np.diag(qdag).copy(),
    )


def block_pcg(a: sparse.spmatrix, b: np.ndarray, rtol: float, maxiter: int) -> np.ndarray:
    """Jacobi-preconditioned CG on all columns of ``b`` at once.

    ``a`` is a Laplacian; each column of ``b`` must sum to zero on every
    component so the system is consistent. Columns stop updating once their
    residual drops below ``rtol`` times their right-hand-side norm.
    """
    d = a.diagonal().copy()
    d[d == 0] = 1.0
    minv = (1.0 / d)[:, None]
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b, axis=0)
    bnorm[bnorm == 0] = 1.0
    z = minv * r
    p = z.copy()
    rz = np.einsum("ij,ij->j", r, z)
    active = np.linalg.norm(r, axis=0) > rtol * bnorm
    for _ in range(maxiter):
        if not active.any():
            return x
        ap = a @ p
        pap = np.einsum("ij,ij->j", p, ap)
        alpha = np.where(active & (pap > 0), rz / np.where(pap > 0, pap, 1.0), 0.0)
        x += alpha * p
        r -= alpha * ap
        z = minv * r
        rz_new = np.einsum("ij,ij->j", r, z)
        beta = np.where(active, rz_new / np.where(rz != 0, rz, 1.0), 0.0)
        p = z + beta * p
        rz = rz_new
        active &= np.linalg.norm(r, axis=0) > rtol * bnorm
    if active.any():
        raise SolverDivergence(f"CG hit the iteration cap ({maxiter}) on {int(active.sum())} columns")
    return x


def approx_effective_resistance(g: WeightedGraph, cfg: ApproxConfig) -> ResistanceProfile:
    """Sketched per-link resistances, accurate to ``1 +- epsilon`` w.h.p.

    Deterministic for a given ``cfg.seed``.
    """
    comp = components(g)
    if g.m == 0:
        return ResistanceProfile(g.n, np.zeros(0), np.zeros(0), comp.beta, comp.labels, epsilon=cfg.epsilon)
    k = cfg.dim(g.n)
    gen = rng.generator(cfg.seed, 0x5EED)
    signs = gen.integers(0, 2, size=(g.m, k), dtype=np.int8).astype(float)
    signs = (2.0 * signs - 1.0) * (np.sqrt(g.weights) / math.sqrt(k))[:, None]
    # incidence^T (n x m) applied to the sketched rows: column = sketch vector
    rows = np.concatenate([g.links[:, 0], g.links[:, 1]])
    cols = np.concatenate([np.arange(g.m), np.arange(g.m)])
    vals = np.concatenate([np.ones(g.m), -np.ones(g.m)])
    bt = sparse.csr_matrix((vals, (rows, cols)), shape=(g.n, g.m))
    rhs = bt @ signs  # n x k
    z = block_pcg(laplacian_sparse(g), rhs, rtol=cfg.rtol(), maxiter=10 * g.n)
    diff = z[g.links[:, 0]] - z[g.links[:, 1]]
    lw = np.einsum("ij,ij->i", diff, diff)
    return ResistanceProfile(
        n=g.n,
        link_omega=lw,
        relative=g.weights * lw,
        beta=comp.beta,
        labels=comp.labels,
        epsilon=cfg.epsilon,
    )


def foster_check(profile: ResistanceProfile) -> float:
    """|sum of relative resistances - (n - beta)|."""
    return abs(float(profile.relative.sum()) - (profile.n - profile.beta))


def profile_rows(g: WeightedGraph, profile: ResistanceProfile):
    """Rows ``(i, j, omega, relative)`` for export."""
    for (i, j), w, rel in zip(g.links, profile.link_omega, profile.relative):
        yield int(i), int(j), float(w), float(rel)


def profile_to_json(g: WeightedGraph, profile: ResistanceProfile) -> dict:
    return {
        "n": profile.n,
        "beta": profile.beta,
        "epsilon": profile.epsilon,
        "links": [{"i": i, "j": j, "omega": w, "relative": r} for i, j, w, r in profile_rows(g, profile)],
        "zeta": None if profile.zeta is None else profile.zeta.tolist(),
    }
