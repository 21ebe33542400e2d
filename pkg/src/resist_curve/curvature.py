"""Node and link resistance curvature and their equivalent characterizations.

For a node, ``p_i = 1 - 1/2 sum_{j~i} c_ij omega_ij``; for a link,
``kappa_ij = 2 (p_i + p_j) / omega_ij``. The remaining functions compute the
same node curvature by independent routes (equilibrium of the resistance
matrix, distances to a probe node, small-time diffusion) and the invariant
``sigma^2 = 1/2 p^T Omega p``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusion import (
    Fit,
    HeatKernel,
    affine_limit,
    default_times,
    richardson_limit,
    walk_ball,
)
from .errors import NegativeEigenvalue, NotADistribution, SingularOmega
from .graph import (
    WeightedGraph,
    laplacian,
    link_removal_components,
    removal_components,
)
from .resistance import ResistanceProfile, effective_resistance

EXACT_TOL = 1e-9


def node_curvature(g: WeightedGraph, profile: ResistanceProfile) -> np.ndarray:
    """p_i = 1 - 1/2 * sum of relative resistances of links at i (1 if isolated)."""
    half = np.zeros(g.n)
    np.add.at(half, g.links[:, 0], profile.relative)
    np.add.at(half, g.links[:, 1], profile.relative)
    return 1.0 - 0.5 * half


def link_curvature(g: WeightedGraph, profile: ResistanceProfile, p: np.ndarray) -> np.ndarray:
    i, j = g.links[:, 0], g.links[:, 1]
    return 2.0 * (p[i] + p[j]) / profile.link_omega


def normalized_link_curvature(g: WeightedGraph, profile: ResistanceProfile, p: np.ndarray) -> np.ndarray:
    """2 (p_i/k_i + p_j/k_j) / omega_ij."""
    k = g.weighted_degrees
    i, j = g.links[:, 0], g.links[:, 1]
    assert np.all(k[i] > 0) and np.all(k[j] > 0)
    return 2.0 * (p[i] / k[i] + p[j] / k[j]) / profile.link_omega


def sigma_squared(profile: ResistanceProfile, p: np.ndarray) -> np.ndarray:
    """1/2 p^T Omega p for each component, indexed by component label."""
    out = np.zeros(profile.beta)
    for c in range(profile.beta):
        nodes, om = profile.block(c)
        pc = p[nodes]
        out[c] = 0.5 * pc @ om @ pc
    return out


def sigma_squared_inverse(profile: ResistanceProfile) -> np.ndarray:
    """1 / (2 u^T Omega^-1 u) per component (0 for single nodes)."""
    out = np.zeros(profile.beta)
    for c in range(profile.beta):
        nodes, om = profile.block(c)
        if len(nodes) == 1:
            continue
        y = np.linalg.solve(om, np.ones(len(nodes)))
        out[c] = 1.0 / (2.0 * y.sum())
    return out


def variance(profile: ResistanceProfile, f) -> float:
    """1/2 f^T Omega f for a distribution f supported on one component."""
    f = np.asarray(f, dtype=float)
    if np.any(f < -1e-12) or abs(f.sum() - 1.0) > 1e-9:
        raise NotADistribution("f must be nonnegative with unit sum")
    support = np.flatnonzero(f)
    om = profile.omega[np.ix_(support, support)]
    if not np.all(np.isfinite(om)):
        raise NotADistribution("f straddles several components")
    return float(0.5 * f[support] @ om @ f[support])


@dataclass(frozen=True)
class CurvatureReport:
    p: np.ndarray
    kappa: np.ndarray  # aligned with g.links
    kappa_norm: np.ndarray
    sigma2: np.ndarray  # per component label
    labels: np.ndarray
    epsilon: float = 0.0

    def node_rows(self):
        return [(i, float(v)) for i, v in enumerate(self.p)]

    def link_rows(self, g: WeightedGraph):
        return [
            (int(i), int(j), float(k), float(kn))
            for (i, j), k, kn in zip(g.links, self.kappa, self.kappa_norm)
        ]

    def to_json(self, g: WeightedGraph) -> dict:
        return {
            "epsilon": self.epsilon,
            "nodes": [{"node": i, "p": v} for i, v in self.node_rows()],
            "links": [
                {"i": i, "j": j, "kappa": k, "kappa_norm": kn} for i, j, k, kn in self.link_rows(g)
            ],
            "components": [
                {"component": c, "size": int((self.labels == c).sum()), "sigma2": s}
                for c, s in enumerate(self.sigma2.tolist())
            ],
        }


def curvature_report(g: WeightedGraph, profile: ResistanceProfile | None = None) -> CurvatureReport:
    """All resistance curvatures of ``g`` (exact profile unless one is given)."""
    if profile is None:
        profile = effective_resistance(g)
    p = node_curvature(g, profile)
    kappa = link_curvature(g, profile, p)
    kn = normalized_link_curvature(g, profile, p) if g.m else np.zeros(0)
    s2 = sigma_squared(profile, p) if profile.omega is not None else np.full(profile.beta, np.nan)
    return CurvatureReport(p, kappa, kn, s2, profile.labels, profile.epsilon)


# -- bounds -----------------------------------------------------------------


@dataclass(frozen=True)
class BoundRecord:
    """One checked inequality ``lower <= value <= upper``.

    ``equality_ok`` states whether the equality clause attached to the bound
    holds (e.g. lower bound attained exactly when all incident links are cut
    links).
    """

    kind: str  # "node", "link" or "cut_node"
    item: tuple
    lower: float
    value: float
    upper: float
    ok: bool
    equality_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.ok and self.equality_ok


def bounds_report(
    g: WeightedGraph,
    profile: ResistanceProfile,
    p: np.ndarray,
    kappa: np.ndarray,
    tol: float | None = None,
) -> list[BoundRecord]:
    """Check the node, link and cut-node curvature bounds.

    The tolerance defaults to 1e-9 for exact profiles and ``3 * epsilon``
    for sketched ones.
    """
    if tol is None:
        tol = EXACT_TOL if profile.exact else 3.0 * profile.epsilon
    beta = profile.beta
    d = g.degrees
    cut = np.abs(profile.relative - 1.0) <= max(tol, 1e-9)
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for k, (i, j) in enumerate(g.links):
        incident[i].append(k)
        incident[j].append(k)

    records = []
    for i in range(g.n):
        if d[i] == 0:
            ok = abs(p[i] - 1.0) <= tol
            records.append(BoundRecord("node", (i,), 1.0, float(p[i]), 1.0, ok))
            continue
        b_local = removal_components(g, [i]) - (beta - 1)
        lo, hi = 1.0 - d[i] / 2.0, 1.0 - b_local / 2.0
        sc = tol * max(1.0, abs(lo), abs(hi))
        ok = lo - sc <= p[i] <= hi + sc
        all_cut = bool(np.all(cut[incident[i]]))
        at_lower = abs(p[i] - lo) <= sc
        records.append(BoundRecord("node", (i,), lo, float(p[i]), hi, ok, all_cut == at_lower))
        if b_local >= 2:
            zero = abs(p[i]) <= sc
            records.append(
                BoundRecord("cut_node", (i,), -np.inf, float(p[i]), 0.0, p[i] <= sc, zero == (d[i] == 2))
            )

    for k, (i, j) in enumerate(g.links):
        w = profile.link_omega[k]
        b_link = link_removal_components(g, (i, j)) - (beta - 1)
        b_nodes = removal_components(g, [i, j]) - (beta - 1)
        lo = (4.0 - d[i] - d[j]) / w
        hi = (6.0 - 2.0 * b_link - b_nodes) / w
        sc = tol * max(1.0, abs(lo), abs(hi))
        ok = lo - sc <= kappa[k] <= hi + sc
        all_cut = bool(np.all(cut[incident[i] + incident[j]]))
        at_lower = abs(kappa[k] - lo) <= sc
        records.append(
            BoundRecord("link", (int(i), int(j)), float(lo), float(kappa[k]), float(hi), ok, all_cut == at_lower)
        )
    return records


# -- alternative characterizations -----------------------------------------------


def equilibrium_curvature(profile: ResistanceProfile, cond_max: float = 1e12) -> np.ndarray:
    """p = Omega^-1 u / (u^T Omega^-1 u), solved per component."""
    p = np.ones(profile.n)
    for c in range(profile.beta):
        nodes, om = profile.block(c)
        if len(nodes) == 1:
            continue
        cond = np.linalg.cond(om)
        if not np.isfinite(cond) or cond > cond_max:
            raise SingularOmega(f"resistance block of component {c} has condition number {cond:.3g}")
        y = np.linalg.solve(om, np.ones(len(nodes)))
        p[nodes] = y / y.sum()
    return p


def distance_characterizations(g: WeightedGraph, profile: ResistanceProfile, x: int) -> np.ndarray:
    """p_i = k_i/2 (omega_ix - sum_{j~i} c_ij/k_i omega_jx) for every i != x.

    The entry at ``x`` itself is NaN (the formula needs a distinct probe).
    Requires a connected graph.
    """
    om = profile.omega
    k = g.weighted_degrees
    # sum_j c_ij omega_jx = (C omega_x)_i
    c_om = g.adjacency @ om[:, x]
    out = 0.5 * (k * om[:, x] - c_om)
    out[x] = np.nan
    return out


def sigma_squared_distance(g: WeightedGraph, profile: ResistanceProfile, x: int) -> float:
    """1/4 sum over links c_ij (omega_ix - omega_jx)^2, for a connected graph."""
    om = profile.omega[:, x]
    diff = om[g.links[:, 0]] - om[g.links[:, 1]]
    return float(0.25 * np.sum(g.weights * diff**2))


@dataclass(frozen=True)
class SimplexEmbedding:
    coords: np.ndarray  # row i is the point of node i

    def point(self, f) -> np.ndarray:
        """Image of a node function f under the linear extension."""
        return np.asarray(f, dtype=float) @ self.coords

    def sq_dist(self, a, b) -> float:
        d = np.asarray(a) - np.asarray(b)
        return float(d @ d)


def simplex_embedding(profile: ResistanceProfile, tol: float = 1e-9) -> SimplexEmbedding:
    """Points with squared distances omega_ij, from the square root of Q^dagger.

    Q^dagger is recovered from Omega by double centring; requires a
    connected graph.
    """
    if profile.beta != 1:
        raise ValueError("simplex embedding needs a connected graph")
    om = profile.omega
    n = profile.n
    h = np.eye(n) - 1.0 / n
    qdag = -0.5 * h @ om @ h
    evals, evecs = np.linalg.eigh(0.5 * (qdag + qdag.T))
    scale = max(1.0, float(np.max(np.abs(evals))))
    if evals.min() < -tol * scale:
        raise NegativeEigenvalue(f"pseudoinverse has eigenvalue {evals.min():.3g}")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return SimplexEmbedding(root)


# -- small-time limits ------------------------------------------------------------


def _kernel(q, walk):
    if walk == "heat":
        hk = HeatKernel(q)
        return hk.column
    if walk == "lazy":
        return lambda i, t: walk_ball(q, i, t).values
    raise ValueError(f"walk must be 'lazy' or 'heat', not {walk!r}")


def limit_node_curvature(
    g: WeightedGraph,
    i: int,
    t_sequence=None,
    *,
    profile: ResistanceProfile | None = None,
    walk: str = "lazy",
    full: bool = False,
):
    """p_i as the t -> 0 limit of 1 - rho^T Omega rho / (4t), rho the walk from i.

    ``walk="lazy"`` uses the one-step ball (I - Qt) e_i, for which the curve
    is exactly affine with slope k_i/2; the default times are
    t0, t0/2, t0/4 with t0 = 1/(8 k_max) and the largest time checks the
    affine fit. ``walk="heat"`` uses exp(-Qt) e_i, whose curve has slope
    k_i - (Q p)_i / 2 and curvature in t, and is extrapolated by Richardson
    from t0 (``t_sequence[0]`` if given). With ``full`` a :class:`Fit` is
    returned instead of the value.
    """
    if profile is None:
        profile = effective_resistance(g)
    q = laplacian(g)
    om = profile.omega
    col = _kernel(q, walk)

    def curve(t):
        rho = col(i, t)
        return 1.0 - rho @ om @ rho / (4.0 * t)

    fit = _extrapolate(curve, g, t_sequence, walk)
    return fit if full else fit.value


def limit_link_curvature(
    g: WeightedGraph,
    link,
    t_sequence=None,
    *,
    profile: ResistanceProfile | None = None,
    walk: str = "lazy",
    full: bool = False,
):
    """kappa_ij as the t -> 0 limit of (1 - rho_i^T Omega rho_j / omega_ij) / t.

    For the lazy ball the curve is affine with slope -2 c_ij / omega_ij.
    Options as in :func:`limit_node_curvature`.
    """
    i, j = link
    g.link_index(i, j)
    if profile is None:
        profile = effective_resistance(g)
    q = laplacian(g)
    om = profile.omega
    col = _kernel(q, walk)
    w = om[i, j]

    def curve(t):
        return (1.0 - col(i, t) @ om @ col(j, t) / w) / t

    fit = _extrapolate(curve, g, t_sequence, walk)
    return fit if full else fit.value


def _extrapolate(curve, g, t_sequence, walk) -> Fit:
    k_max = float(g.weighted_degrees.max())
    if t_sequence is None:
        t_sequence = default_times(k_max)
    t_sequence = [float(t) for t in t_sequence]
    if walk == "lazy":
        if len(t_sequence) < 3:
            raise ValueError("need at least three times for the affine check")
        if max(t_sequence) > 1.0 / k_max:
            raise ValueError("lazy-walk times must not exceed 1/k_max")
        return affine_limit(t_sequence, [curve(t) for t in t_sequence])
    return richardson_limit(curve, max(t_sequence))
