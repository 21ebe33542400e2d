"""Ensemble experiments: mean link curvature across Erdos-Renyi densities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import curvature_report
from .generators import erdos_renyi
from .graph import components
from .resistance import effective_resistance


def log_grid(lo: float, hi: float, k: int) -> np.ndarray:
    """``k`` log-spaced points from ``lo`` to ``hi`` inclusive."""
    return np.logspace(math.log10(lo), math.log10(hi), k)


@dataclass(frozen=True)
class SweepRow:
    rho: float
    mean_kappa: float  # pooled over all links of all samples; nan without links
    links: int
    giant_fraction: float  # mean over samples of largest component / n
    p_hist: np.ndarray  # counts of node curvature over HIST_EDGES


HIST_EDGES = np.linspace(-1.0, 1.0, 41)


def _one(n, rho, seed, k):
    g = erdos_renyi(n, float(rho), seed=_sample_seed(seed, k))
    rep = curvature_report(g, effective_resistance(g))
    comp = components(g)
    giant = np.bincount(comp.labels).max() / n
    hist, _ = np.histogram(np.clip(rep.p, HIST_EDGES[0], HIST_EDGES[-1]), HIST_EDGES)
    return rep.kappa.sum(), g.m, giant, hist


def _sample_seed(seed: int, k: int) -> int:
    from .rng import child_seed

    return child_seed(seed, 0x5EE9, k)


def er_sweep(n: int, rhos, samples: int, seed: int, map_fn=map) -> list[SweepRow]:
    """Mean link curvature, giant-component fraction and p histogram per rho.

    Sample k at grid index a uses seed ``child_seed(seed, 0x5EE9, a*samples + k)``.
    """
    rhos = np.asarray(rhos, dtype=float)
    if np.any(rhos <= 0) or np.any(rhos > 1):
        raise ValueError("rho grid must lie in (0, 1]")
    jobs = [(a, k) for a in range(len(rhos)) for k in range(samples)]
    res = list(map_fn(lambda ak: _one(n, rhos[ak[0]], seed, ak[0] * samples + ak[1]), jobs))
    rows = []
    for a, rho in enumerate(rhos):
        part = res[a * samples:(a + 1) * samples]
        ksum = sum(x[0] for x in part)
        m = sum(x[1] for x in part)
        rows.append(SweepRow(
            rho=float(rho),
            mean_kappa=float(ksum / m) if m else math.nan,
            links=int(m),
            giant_fraction=float(np.mean([x[2] for x in part])),
            p_hist=np.sum([x[3] for x in part], axis=0),
        ))
    return rows


SWEEP_HEADER = ("rho", "mean_kappa", "links", "giant_fraction")


def sweep_csv_rows(rows):
    for r in rows:
        yield r.rho, r.mean_kappa, r.links, r.giant_fraction


def hist_csv_rows(rows):
    """Long-format histogram: rho, bin_lo, bin_hi, count."""
    for r in rows:
        for lo, hi, c in zip(HIST_EDGES[:-1], HIST_EDGES[1:], r.p_hist):
            yield r.rho, float(lo), float(hi), int(c)


def zero_crossings(rows) -> list[tuple[float, float]]:
    """Consecutive (rho_a, rho_b) pairs where the mean curvature changes sign."""
    pts = [(r.rho, r.mean_kappa) for r in rows if not math.isnan(r.mean_kappa)]
    return [(a[0], b[0]) for a, b in zip(pts, pts[1:]) if a[1] > 0 >= b[1] or a[1] < 0 <= b[1]]
