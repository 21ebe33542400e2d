"""Heat kernels, lazy walk balls and small-t extrapolation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NonLinearTail


@dataclass(frozen=True)
class HeatDistribution:
    t: float
    source: int
    values: np.ndarray


@dataclass(frozen=True)
class WalkBall:
    t: float
    source: int
    values: np.ndarray
    normalized: bool = False

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values > 0)


class HeatKernel:
    """exp(-Q t) via one symmetric eigendecomposition of Q."""

    def __init__(self, q: np.ndarray):
        self.q = np.asarray(q, dtype=float)
        self.evals, self.evecs = np.linalg.eigh(self.q)

    def column(self, i: int, t: float) -> np.ndarray:
        return self.evecs @ (np.exp(-self.evals * t) * self.evecs[i])


def heat_distribution(q: np.ndarray, i: int, t: float) -> HeatDistribution:
    """Distribution of a continuous-time walker started at ``i``, at time ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return HeatDistribution(float(t), int(i), HeatKernel(q).column(i, t))


def walk_ball(q: np.ndarray, i: int, t: float, normalized: bool = False) -> WalkBall:
    """One step of the lazy walk from ``i``: (I - Q t) e_i.

    With ``normalized`` the step is (I - Q diag(k)^-1 t) e_i instead.
    Valid for 0 <= t <= 1/k_max (normalized: 0 <= t <= 1).
    """
    q = np.asarray(q, dtype=float)
    col = -q[:, i] * t
    if normalized:
        col = col / q[i, i]
    col[i] += 1.0
    col[np.abs(col) < 1e-300] = 0.0
    if np.any(col < -1e-12):
        raise ValueError(f"t={t} too large for a lazy walk ball")
    return WalkBall(float(t), int(i), np.clip(col, 0.0, None), normalized)


class Fit(NamedTuple):
    """Extrapolated value at t=0, slope there, and the consistency residual."""

    value: float
    slope: float
    residual: float


def default_times(k_max: float) -> tuple[float, float, float]:
    t0 = 1.0 / (8.0 * k_max)
    return (t0, t0 / 2, t0 / 4)


def affine_limit(ts, values, rtol: float = 1e-7) -> Fit:
    """Line through the two smallest ``ts``; the largest checks affinity.

    Raises :class:`NonLinearTail` when the line misses the remaining point by
    more than ``rtol`` (relative to max(1, |value|)).
    """
    order = np.argsort(ts)
    ts = np.asarray(ts, dtype=float)[order]
    vs = np.asarray(values, dtype=float)[order]
    slope = (vs[1] - vs[0]) / (ts[1] - ts[0])
    value = vs[0] - slope * ts[0]
    pred = value + slope * ts[2:]
    resid = float(np.max(np.abs(pred - vs[2:]))) if len(ts) > 2 else 0.0
    if resid > rtol * max(1.0, abs(value)):
        raise NonLinearTail(f"affine tail residual {resid:.3g} exceeds {rtol:.1g}")
    return Fit(float(value), float(slope), resid)


def richardson_limit(fn: Callable[[float], float], t0: float, levels: int = 7, rtol: float = 1e-7) -> Fit:
    """Polynomial (Neville) extrapolation to t=0 over t0, t0/2, ..., t0/2^(levels-1).

    For smooth non-affine tails such as the heat-kernel curves. The residual
    is the change between the last two diagonal estimates.
    """
    ts = t0 / 2.0 ** np.arange(levels)
    vs = np.array([fn(t) for t in ts])
    table = [vs.copy()]
    for k in range(1, levels):
        prev = table[-1]
        # extrapolate to 0 using ratio t_{j}/t_{j+k} = 2^k
        f = 2.0**k
        table.append((f * prev[1:] - prev[:-1]) / (f - 1.0))
    diag = np.array([col[-1] for col in table])
    value = float(diag[-1])
    resid = float(abs(diag[-1] - diag[-2]))
    if resid > rtol * max(1.0, abs(value)):
        raise NonLinearTail(f"Richardson extrapolation did not settle (change {resid:.3g})")
    # slope at 0 from a polynomial fit on the smallest points
    k = min(levels, 5)
    coef = np.polynomial.polynomial.polyfit(ts[-k:], vs[-k:], k - 1)
    return Fit(value, float(coef[1]), resid)
