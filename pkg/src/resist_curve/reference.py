"""Established discrete curvatures evaluated with resistance data.

* combinatorial curvature of an embedded node, 1 - d/2 + sum 1/face degree;
* Forman-Ricci curvature of a link (unit weights: 4 - d_i - d_j);
* Ollivier-Ricci curvature with the resistance metric and lazy walk balls,
  and its degree-normalized (Lin-Lu-Yau) variant.

Transport problems are solved exactly as small linear programs on the
supports of the two balls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .curvature import curvature_report
from .diffusion import Fit, affine_limit, walk_ball
from .errors import InfeasibleMarginals, InvalidFaceDegree
from .graph import WeightedGraph, laplacian
from .resistance import ResistanceProfile, effective_resistance

UNBOUNDED = math.inf


def combinatorial_curvature(d: int, face_degrees) -> float:
    """1 - d/2 + sum of 1/d_f; pass ``math.inf`` for an unbounded face."""
    if d < 0:
        raise InvalidFaceDegree(f"negative degree {d}")
    total = 1.0 - d / 2.0
    for df in face_degrees:
        if df == UNBOUNDED:
            continue
        if df < 3 or int(df) != df:
            raise InvalidFaceDegree(f"face degree {df} (need an integer >= 3)")
        total += 1.0 / df
    return total


def forman_curvature(g: WeightedGraph, link) -> float:
    """Forman-Ricci curvature with unit node and link weights: 4 - d_i - d_j."""
    i, j = link
    g.link_index(i, j)
    return float(4 - g.degrees[i] - g.degrees[j])


def forman_curvature_weighted(g: WeightedGraph, link, node_weights=None, link_weights=None) -> float:
    """Forman-Ricci curvature for arbitrary positive node and link weights.

    ``link_weights`` is aligned with ``g.links`` (defaults to all ones), as
    is ``node_weights`` with the nodes.
    """
    i, j = link
    e = g.link_index(i, j)
    wn = np.ones(g.n) if node_weights is None else np.asarray(node_weights, dtype=float)
    wl = np.ones(g.m) if link_weights is None else np.asarray(link_weights, dtype=float)

    def side(a):
        s = sum(math.sqrt(wl[e] / wl[g.link_index(a, k)]) for k in g.neighbors(a))
        return 2.0 * wn[a] * (1.0 - 0.5 * s)

    return side(i) + side(j)


@dataclass(frozen=True)
class TransportPlan:
    rows: np.ndarray  # node ids of the source support
    cols: np.ndarray  # node ids of the target support
    entries: np.ndarray  # len(rows) x len(cols)
    cost: float

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros((n, n))
        out[np.ix_(self.rows, self.cols)] = self.entries
        return out


def wasserstein1(mu, nu, cost) -> TransportPlan:
    """Exact optimal transport between two distributions on the node set.

    Only the supports enter the linear program, so ``cost`` may be infinite
    elsewhere (e.g. a resistance matrix with several components).
    """
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.any(mu < 0) or np.any(nu < 0) or abs(mu.sum() - nu.sum()) > 1e-12 * max(1.0, mu.sum()):
        raise InfeasibleMarginals("marginals must be nonnegative with equal mass")
    rows = np.flatnonzero(mu > 0)
    cols = np.flatnonzero(nu > 0)
    d = np.asarray(cost, dtype=float)[np.ix_(rows, cols)]
    if not np.all(np.isfinite(d)):
        raise InfeasibleMarginals("supports lie in different components")
    a, b = len(rows), len(cols)
    # equality constraints: row sums then column sums (drop one: redundant)
    a_eq = np.zeros((a + b, a * b))
    for r in range(a):
        a_eq[r, r * b:(r + 1) * b] = 1.0
    for c in range(b):
        a_eq[a + c, c::b] = 1.0
    b_eq = np.concatenate([mu[rows], nu[cols]])
    res = linprog(
        d.ravel(),
        A_eq=a_eq[:-1],
        b_eq=b_eq[:-1],
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise InfeasibleMarginals(f"transport LP failed: {res.message}")
    plan = np.clip(res.x.reshape(a, b), 0.0, None)
    return TransportPlan(rows, cols, plan, float(np.sum(plan * d)))


def _or_times(g: WeightedGraph, normalized: bool):
    # lazy ball needs t <= 1/k_max; normalized ball needs t <= 1
    t0 = 1.0 / 8.0 if normalized else 1.0 / (8.0 * float(g.weighted_degrees.max()))
    return (t0, t0 / 2, t0 / 4)


def _ollivier(g, profile, link, t_sequence, normalized, full) -> float | Fit:
    i, j = link
    g.link_index(i, j)
    if profile is None:
        profile = effective_resistance(g)
    q = laplacian(g)
    om = profile.omega
    w = om[i, j]
    if t_sequence is None:
        t_sequence = _or_times(g, normalized)

    def curve(t):
        mi = walk_ball(q, i, t, normalized).values
        mj = walk_ball(q, j, t, normalized).values
        return (1.0 - wasserstein1(mi, mj, om).cost / w) / t

    # W1 is piecewise linear in t, so the curve is flat for small t
    fit = affine_limit(t_sequence, [curve(t) for t in t_sequence], rtol=1e-6)
    return fit if full else fit.value


def ollivier_curvature_resistance(
    g: WeightedGraph, profile: ResistanceProfile | None, link, t_sequence=None, *, full=False
):
    """Lin-Lu-Yau limit of Ollivier-Ricci curvature, resistance metric, lazy walk."""
    return _ollivier(g, profile, link, t_sequence, False, full)


def lly_normalized_curvature(
    g: WeightedGraph, profile: ResistanceProfile | None, link, t_sequence=None, *, full=False
):
    """As :func:`ollivier_curvature_resistance` with the degree-normalized walk."""
    return _ollivier(g, profile, link, t_sequence, True, full)


COMPARISON_HEADER = ("i", "j", "kappa", "kappa_or", "kappa_lly", "kappa_fr_over_omega", "sandwich_ok")


def comparison_table(g: WeightedGraph, profile: ResistanceProfile | None = None, slack: float = 1e-6):
    """Rows of FR/omega <= kappa <= OR for every link, plus the LLY value."""
    if profile is None:
        profile = effective_resistance(g)
    rep = curvature_report(g, profile)
    rows = []
    for k, (i, j) in enumerate(g.links):
        link = (int(i), int(j))
        kor = ollivier_curvature_resistance(g, profile, link)
        klly = lly_normalized_curvature(g, profile, link)
        fr = forman_curvature(g, link) / profile.link_omega[k]
        kap = rep.kappa[k]
        ok = bool(fr <= kap + slack and kap <= kor + slack)
        rows.append((link[0], link[1], float(kap), float(kor), float(klly), float(fr), ok))
    return rows
