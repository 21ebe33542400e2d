"""Resistance Ricci flow in Laplacian form, dQ/dt = 2 Q diag(p) Q.

Equivalently each resistance obeys d omega_ij/dt = -2 (p_i + p_j). The flow
is a gradient flow of the potential tr(Omega Q Omega)/2 = 2 n sigma^2 and
blows up in finite time.

Integration uses an embedded Dormand-Prince 5(4) pair with per-step error
control. After every accepted step Q is symmetrized and its row sums are
projected back to zero, so it remains a generalized Laplacian (possibly
with positive off-diagonals once it leaves the Laplacian cone).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import (
    BlowUpDetected,
    DisconnectedDuringFlow,
    LeftLaplacianCone,
    NumericalError,
    PastBlowUp,
)
from .graph import WeightedGraph, build_graph
from .resistance import pseudoinverse, resistance_matrix

CONE_TOL = 1e-10

# Dormand-Prince tableau
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass(frozen=True)
class StepControl:
    rtol: float = 1e-8
    atol: float = 1e-12
    h0: float | None = None
    growth_limit: float = 1e6  # spectral radius relative to Q0
    h_min_rel: float = 1e-13  # step underflow, relative to max(1, t)
    max_steps: int = 1_000_000


@dataclass(frozen=True)
class FlowState:
    Q: np.ndarray
    t: float
    is_laplacian: bool
    merges: tuple = ()  # (t, kept, removed) in current numbering

    @property
    def n(self) -> int:
        return self.Q.shape[0]


@dataclass(frozen=True)
class FlowSample:
    t: float
    state: FlowState
    p: np.ndarray
    sigma2: float
    potential: float
    omega: np.ndarray

    @property
    def min_weight(self) -> float:
        q = self.state.Q
        off = -q[np.triu_indices(q.shape[0], 1)]
        scale = max(1.0, float(np.max(np.abs(np.diag(q)))))
        nz = off[np.abs(off) > 1e-10 * scale]
        return float(nz.min()) if len(nz) else 0.0


@dataclass
class FlowTrajectory:
    samples: list = field(default_factory=list)
    halt_reason: str | None = None
    halt_time: float | None = None
    steps: int = 0
    rejected: int = 0
    potential_monotone: bool = True

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def csv_rows(self):
        for s in self.samples:
            yield (s.t, s.potential, s.sigma2, s.min_weight, s.state.is_laplacian)

    CSV_HEADER = ("t", "potential", "sigma2", "min_weight", "is_laplacian")


def _check_square(q):
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("Q must be a square matrix")
    return q


def omega_of(q: np.ndarray) -> np.ndarray:
    """Resistance matrix of a generalized Laplacian with connected support."""
    n = q.shape[0]
    scale = max(1.0, float(np.max(np.abs(np.diag(q)))))
    pattern = sparse.csr_matrix(np.abs(q - np.diag(np.diag(q))) > 1e-14 * scale)
    beta, labels = csgraph.connected_components(pattern, directed=False)
    if beta != 1 and n > 1:
        raise DisconnectedDuringFlow("support of Q is disconnected", t=float("nan"))
    return resistance_matrix(pseudoinverse(q, labels), labels)


def node_curvature_q(q: np.ndarray, omega: np.ndarray | None = None) -> np.ndarray:
    """p = 1 + diag(Q Omega)/2; agrees with 1 - sum c omega / 2 on Laplacians."""
    if omega is None:
        omega = omega_of(q)
    return 1.0 + 0.5 * np.einsum("ij,ji->i", q, omega)


def flow_rhs(q: np.ndarray, normalized: bool = False) -> np.ndarray:
    """2 Q diag(p) Q (or 2 Q diag(p/k) Q with ``normalized``)."""
    q = _check_square(q)
    p = node_curvature_q(q)
    if normalized:
        p = p / np.diag(q)
    out = 2.0 * (q * p[None, :]) @ q
    return 0.5 * (out + out.T)


def potential(q: np.ndarray, omega: np.ndarray | None = None) -> float:
    """tr(Omega Q Omega) / 2."""
    if omega is None:
        omega = omega_of(q)
    return 0.5 * float(np.einsum("ij,jk,ki->", omega, q, omega))


def _project(q: np.ndarray) -> np.ndarray:
    q = 0.5 * (q + q.T)
    off = q - np.diag(np.diag(q))
    return off - np.diag(off.sum(axis=1))


def _is_laplacian(q: np.ndarray) -> bool:
    # CONE_TOL at unit scale, growing with the entries to absorb roundoff
    off = q - np.diag(np.diag(q))
    return bool(np.all(off <= CONE_TOL * max(1.0, float(np.max(np.abs(q))))))


def _sample(q, t, is_lap, merges) -> FlowSample:
    om = omega_of(q)
    p = node_curvature_q(q, om)
    return FlowSample(
        t=float(t),
        state=FlowState(q.copy(), float(t), is_lap, tuple(merges)),
        p=p,
        sigma2=0.5 * float(p @ om @ p),
        potential=potential(q, om),
        omega=om,
    )


def _contract(q: np.ndarray, i: int, j: int) -> np.ndarray:
    # fold node j into node i: conductances in parallel add
    q = q.copy()
    q[i, :] += q[j, :]
    q[:, i] += q[:, j]
    keep = np.array([k for k in range(q.shape[0]) if k != j])
    return _project(q[np.ix_(keep, keep)])


def _integrate(q0, t_end, ctl, sample_times, normalized, on_merge, on_cone_exit, check_potential=True):
    q = _project(_check_square(q0))
    if on_merge not in ("halt", "merge"):
        raise ValueError("on_merge must be 'halt' or 'merge'")
    if on_cone_exit not in ("continue", "halt"):
        raise ValueError("on_cone_exit must be 'continue' or 'halt'")
    if not _is_laplacian(q):
        raise ValueError("Q0 must be a Laplacian (nonpositive off-diagonals)")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 101)
    targets = np.unique(np.clip(np.asarray(sample_times, dtype=float), 0.0, t_end))
    if targets[-1] < t_end:
        targets = np.append(targets, t_end)

    def rhs(x):
        try:
            return flow_rhs(x, normalized)
        except DisconnectedDuringFlow as exc:
            raise DisconnectedDuringFlow(str(exc), t=t, trajectory=traj) from None

    traj = FlowTrajectory()
    rho0 = float(np.max(np.abs(np.linalg.eigvalsh(q))))
    t = 0.0
    merges: list = []
    is_lap = True
    last_pot = None
    h = ctl.h0 if ctl.h0 is not None else 1e-3 / max(rho0, 1e-300)

    def record(qq, tt):
        nonlocal last_pot
        s = _sample(qq, tt, is_lap, merges)
        if is_lap and last_pot is not None and s.potential > last_pot + 1e-8 * max(1.0, abs(last_pot)):
            traj.potential_monotone = False
            if check_potential:
                raise NumericalError(
                    f"potential increased from {last_pot!r} to {s.potential!r} at t={tt!r}"
                )
        last_pot = s.potential if is_lap else None
        traj.samples.append(s)

    def record_halt(qq, tt, reason):
        traj.halt_reason, traj.halt_time = reason, float(tt)
        try:
            traj.samples.append(_sample(qq, tt, is_lap, merges))
        except (NumericalError, np.linalg.LinAlgError):
            pass

    ti = 0
    if targets[0] == 0.0:
        record(q, 0.0)
        ti = 1
    k1 = rhs(q)
    while ti < len(targets):
        if traj.steps + traj.rejected > ctl.max_steps:
            raise NumericalError(f"step budget exhausted at t={t!r}")
        goal = targets[ti]
        if h < ctl.h_min_rel * max(1.0, t):
            record_halt(q, t, "step_underflow")
            raise BlowUpDetected(f"step size underflow at t={t!r}", t=t, trajectory=traj)
        # land on sample times exactly; never leave a sliver behind
        hit = t + h * (1.0 + 1e-6) >= goal
        step = goal - t if hit else h
        ks = [k1]
        for s in range(1, 7):
            incr = sum(a * kk for a, kk in zip(_A[s], ks))
            ks.append(rhs(q + step * incr))
        q5 = q + step * sum(b * kk for b, kk in zip(_B5, ks))
        q4 = q + step * sum(b * kk for b, kk in zip(_B4, ks))
        # entries far below the matrix scale are judged against that scale,
        # otherwise roundoff in structural zeros stalls the step control
        floor = 1e-3 * float(np.max(np.abs(q5)))
        scale = ctl.atol + ctl.rtol * np.maximum(np.maximum(np.abs(q), np.abs(q5)), floor)
        err = float(np.max(np.abs(q5 - q4) / scale))
        if not np.isfinite(err) or err > 1.0:
            traj.rejected += 1
            fac = 0.2 if not np.isfinite(err) else max(0.2, 0.9 * err ** -0.2)
            h = step * fac
            continue
        traj.steps += 1
        t = goal if hit else t + step
        q = _project(q5)
        k1 = rhs(q)  # not FSAL after projection
        h = step * min(5.0, 0.9 * max(err, 1e-10) ** -0.2)
        if hit:
            h = max(h, step)

        rho = float(np.max(np.abs(np.linalg.eigvalsh(q))))
        if rho > ctl.growth_limit * rho0:
            record_halt(q, t, "blow_up")
            raise BlowUpDetected(f"spectral radius grew by more than {ctl.growth_limit:g}", t=t, trajectory=traj)
        if is_lap and not _is_laplacian(q):
            is_lap = False
            if on_cone_exit == "halt":
                record_halt(q, t, "left_cone")
                raise LeftLaplacianCone(f"positive off-diagonal at t={t!r}", t=t, trajectory=traj)
        om = omega_of(q)
        iu = np.triu_indices(q.shape[0], 1)
        if q.shape[0] > 2:
            thresh = 1e-6 * float(np.median(om[iu]))
            small = np.flatnonzero(om[iu] < thresh)
            if len(small):
                a, b = int(iu[0][small[0]]), int(iu[1][small[0]])
                if on_merge == "halt":
                    record_halt(q, t, "merge_threshold")
                    return traj
                merges.append((t, a, b))
                q = _contract(q, a, b)
                k1 = rhs(q)
                rho0 = float(np.max(np.abs(np.linalg.eigvalsh(q))))
        if hit:
            record(q, t)
            ti += 1
    return traj


def integrate_flow(
    q0,
    t_end: float,
    step_control: StepControl | None = None,
    *,
    sample_times=None,
    on_merge: str = "halt",
    on_cone_exit: str = "continue",
) -> FlowTrajectory:
    """Integrate dQ/dt = 2 Q diag(p) Q from ``q0`` up to ``t_end``.

    Parameters
    ----------
    q0 : array_like
        Laplacian of a connected graph.
    t_end : float
        Final time.
    step_control : StepControl, optional
        Tolerances and halting thresholds.
    sample_times : array_like, optional
        Times at which states are recorded (hit exactly). Defaults to 101
        evenly spaced times.
    on_merge : {"halt", "merge"}
        What to do when a resistance drops below 1e-6 times the median.
    on_cone_exit : {"continue", "halt"}
        Whether to raise :class:`LeftLaplacianCone` on the first positive
        off-diagonal entry. When continuing, ``is_laplacian`` is recorded as
        false in the samples and potential monotonicity is no longer checked.

    Raises
    ------
    BlowUpDetected
        Spectral radius grew beyond ``growth_limit`` or the step underflowed.
    LeftLaplacianCone
        Only with ``on_cone_exit="halt"``.
    """
    return _integrate(q0, t_end, step_control or StepControl(), sample_times, False, on_merge, on_cone_exit)


def integrate_normalized_flow(
    q0, t_end: float, step_control: StepControl | None = None, *, sample_times=None,
    on_merge: str = "halt", on_cone_exit: str = "continue",
) -> FlowTrajectory:
    """As :func:`integrate_flow` for dQ/dt = 2 Q diag(p/k) Q, k = diag(Q).

    The potential is not a Lyapunov function here; monotonicity is recorded
    in ``potential_monotone`` but never enforced.
    """
    return _integrate(
        q0, t_end, step_control or StepControl(), sample_times, True, on_merge, on_cone_exit,
        check_potential=False,
    )


def resistance_flow_check(traj: FlowTrajectory) -> float:
    """Max |d omega/dt + 2 (p_i + p_j)| over interior samples.

    Derivatives are three-point finite differences on the (possibly uneven)
    sample grid, so samples must be dense. Samples straddling a merge are
    skipped.
    """
    s = traj.samples
    worst = 0.0
    for k in range(1, len(s) - 1):
        a, b, c = s[k - 1], s[k], s[k + 1]
        if not (a.omega.shape == b.omega.shape == c.omega.shape):
            continue
        h1, h2 = b.t - a.t, c.t - b.t
        d = (-h2 / (h1 * (h1 + h2))) * a.omega + ((h2 - h1) / (h1 * h2)) * b.omega + (h1 / (h2 * (h1 + h2))) * c.omega
        target = -2.0 * (b.p[:, None] + b.p[None, :])
        iu = np.triu_indices(len(b.p), 1)
        worst = max(worst, float(np.max(np.abs(d[iu] - target[iu]))))
    return worst


def gradient_check(q, h: float = 1e-4, rederive: bool = False) -> float:
    """Max deviation of finite-difference potential gradients from theory.

    Each off-diagonal pair of Omega is perturbed symmetrically by +-h. By
    default Q is held fixed in tr(Omega Q Omega)/2, whose gradient is
    2 (p_i + p_j). With ``rederive`` the perturbed Omega is mapped back to Q
    through the inverse -Q/2 + p p^T/(2 sigma^2), i.e. the potential is taken
    as n/(u^T Omega^-1 u); the gradient is then 2 n p_i p_j.
    """
    q = _project(_check_square(q))
    n = q.shape[0]
    om = omega_of(q)
    p = node_curvature_q(q, om)
    u = np.ones(n)

    def pot(o):
        if rederive:
            return n / float(u @ np.linalg.solve(o, u))
        return potential(q, o)

    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = e[j, i] = h
            fd = (pot(om + e) - pot(om - e)) / (2 * h)
            want = 2 * n * p[i] * p[j] if rederive else 2.0 * (p[i] + p[j])
            worst = max(worst, abs(fd - want))
    return worst


def transitive_closed_form(q0, t: float) -> np.ndarray:
    """Q(t) = [I - (2t/n) Q0]^+ Q0 for node-transitive graphs.

    Each eigenvalue x of Q0 evolves as x / (1 - 2 t x / n), so the solution
    exists for t < n / (2 mu_max).
    """
    q0 = _check_square(q0)
    n = q0.shape[0]
    x, v = np.linalg.eigh(q0)
    tb = blow_up_time(q0)
    if t >= tb:
        raise PastBlowUp(f"t={t!r} is past the blow-up time {tb!r}")
    xt = x / (1.0 - 2.0 * t * x / n)
    return _project((v * xt) @ v.T)


def blow_up_time(q0) -> float:
    """n / (2 mu_max) for a node-transitive Laplacian."""
    q0 = _check_square(q0)
    return q0.shape[0] / (2.0 * float(np.linalg.eigvalsh(q0)[-1]))


def merge_nodes(g: WeightedGraph, i: int, j: int) -> WeightedGraph:
    """Contract link (i, j); parallel links add, nodes above j shift down by one."""
    g.link_index(i, j)
    keep, drop = min(i, j), max(i, j)

    def relabel(a):
        a = keep if a == drop else a
        return a - 1 if a > drop else a

    acc: dict[tuple[int, int], float] = {}
    for a, b, c in g.edge_list():
        a, b = relabel(a), relabel(b)
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        acc[key] = acc.get(key, 0.0) + c
    return build_graph([(a, b, c) for (a, b), c in acc.items()], n=g.n - 1)


def snapshot_json(traj: FlowTrajectory, times=None) -> list:
    """Full-matrix snapshots (Q, p) at the requested sample times."""
    out = []
    for s in traj.samples:
        if times is None or any(abs(s.t - x) <= 1e-12 * max(1.0, abs(x)) for x in times):
            out.append({"t": s.t, "Q": s.state.Q.tolist(), "p": s.p.tolist(), "is_laplacian": s.state.is_laplacian})
    return out
