import numpy as np
import pytest

from resist_curve.curvature import curvature_report, sigma_squared
from resist_curve.errors import BlowUpDetected, LeftLaplacianCone, LinkNotFound, PastBlowUp
from resist_curve.flow import (
    FlowTrajectory,
    StepControl,
    blow_up_time,
    flow_rhs,
    gradient_check,
    integrate_flow,
    integrate_normalized_flow,
    merge_nodes,
    node_curvature_q,
    potential,
    resistance_flow_check,
    snapshot_json,
    transitive_closed_form,
)
from resist_curve.generators import complete_graph, cycle_graph, path_graph, random_connected_graph
from resist_curve.graph import build_graph, laplacian
from resist_curve.resistance import effective_resistance


def test_rhs_single_edge():
    # p = (1/2, 1/2): dc/dt = 2 c^2, so the off-diagonal of the rhs is -2 at c = 1
    r = flow_rhs(laplacian(build_graph([(0, 1)])))
    assert r[0, 1] == pytest.approx(-2.0)
    assert np.allclose(r.sum(axis=1), 0)


def test_rhs_path_end_link():
    # end link of a path: p = (1/2, 0), dc/dt = c^2
    r = flow_rhs(laplacian(path_graph(4)))
    assert r[0, 1] == pytest.approx(-1.0)
    assert r[1, 2] == pytest.approx(0.0, abs=1e-12)


def test_rhs_cycle():
    q = laplacian(cycle_graph(7))
    assert np.allclose(flow_rhs(q), 2 * q @ q / 7, atol=1e-12)


def test_rhs_matches_link_weight_form():
    # d c_ij/dt = -(dQ/dt)_ij = -2 sum_k Q_ik p_k Q_kj
    g = random_connected_graph(7, 6, seed=1)
    q = laplacian(g)
    p = curvature_report(g).p
    r = flow_rhs(q)
    for i in range(7):
        for j in range(7):
            if i != j:
                want = 2 * sum(q[i, k] * p[k] * q[k, j] for k in range(7))
                assert r[i, j] == pytest.approx(want, abs=1e-10)


def test_generalized_laplacian_curvature_agrees():
    g = random_connected_graph(8, 5, seed=2)
    assert np.allclose(node_curvature_q(laplacian(g)), curvature_report(g).p, atol=1e-10)


def test_potential_values():
    assert potential(laplacian(build_graph([(0, 1)]))) == pytest.approx(1.0)
    g = random_connected_graph(8, 6, seed=3)
    prof = effective_resistance(g)
    p = curvature_report(g, prof).p
    assert potential(laplacian(g)) == pytest.approx(2 * g.n * sigma_squared(prof, p)[0], rel=1e-8)


def test_gradient_check():
    assert gradient_check(laplacian(build_graph([(0, 1)]))) < 1e-8
    assert gradient_check(laplacian(cycle_graph(3))) < 1e-8
    assert gradient_check(laplacian(random_connected_graph(5, 3, seed=4))) < 1e-5


def test_gradient_check_through_inverse():
    # with Q re-derived from Omega the gradient becomes 2 n p_i p_j
    assert gradient_check(laplacian(random_connected_graph(5, 3, seed=4)), rederive=True) < 1e-5


def test_closed_form_basics():
    q0 = laplacian(complete_graph(2))
    assert np.allclose(transitive_closed_form(q0, 0.0), q0)
    # eigenvalue 2 -> 2/(1 - 2t)
    q = transitive_closed_form(q0, 0.2)
    assert np.linalg.eigvalsh(q)[-1] == pytest.approx(2 / (1 - 0.4))
    with pytest.raises(PastBlowUp):
        transitive_closed_form(q0, 0.5)


def test_cycle_four_matches_closed_form():
    q0 = laplacian(cycle_graph(4))
    t = 4 / (8 * 4.0)
    tr = integrate_flow(q0, t, sample_times=[0.0, t])
    want = transitive_closed_form(q0, t)
    assert np.max(np.abs(tr.samples[-1].state.Q - want)) <= 1e-6 * np.max(np.abs(want))


def test_transitivity_is_preserved():
    q0 = laplacian(cycle_graph(6))
    tr = integrate_flow(q0, 0.5)
    for s in tr.samples:
        assert np.ptp(s.p) <= 1e-8


def test_row_sums_stay_zero():
    tr = integrate_flow(laplacian(random_connected_graph(6, 4, seed=5)), 0.05)
    for s in tr.samples:
        assert np.max(np.abs(s.state.Q.sum(axis=1))) <= 1e-10
        assert np.array_equal(s.state.Q, s.state.Q.T)


def test_path_end_link_closed_form():
    tr = integrate_flow(laplacian(path_graph(4)), 0.9, sample_times=np.linspace(0, 0.9, 46))
    for s in tr.samples:
        c = -s.state.Q[0, 1]
        assert abs(c - 1 / (1 - s.t)) <= 1e-6 * (1 / (1 - s.t))
    pots = [s.potential for s in tr.samples]
    assert np.all(np.diff(pots) <= 0)


def test_resistance_flow_check_on_random_graph():
    g = random_connected_graph(6, 4, seed=6)
    tr = integrate_flow(laplacian(g), 0.02, sample_times=np.linspace(0, 0.02, 161))
    assert resistance_flow_check(tr) <= 1e-4


def test_resistance_flow_rates():
    tr = integrate_flow(laplacian(cycle_graph(3)), 0.05, sample_times=np.linspace(0, 0.05, 11))
    s = tr.samples[0]
    assert np.allclose(-2 * (s.p[:, None] + s.p[None, :])[0, 1], -4 / 3)
    assert resistance_flow_check(tr) <= 1e-8


def test_single_edge_blows_up_at_half_inverse_weight():
    for c0 in (1.0, 2.5):
        with pytest.raises(BlowUpDetected) as exc:
            integrate_flow(laplacian(build_graph([(0, 1, c0)])), 2.0 / c0)
        assert exc.value.t == pytest.approx(1 / (2 * c0), rel=1e-2)
        assert exc.value.trajectory.halt_reason == "blow_up"


def test_path_blow_up_at_inverse_weight():
    with pytest.raises(BlowUpDetected) as exc:
        integrate_flow(laplacian(path_graph(3)), 1.5)
    assert exc.value.t == pytest.approx(1.0, rel=1e-2)
    assert exc.value.trajectory.samples[-1].t == exc.value.t


def test_cone_exit_policy():
    q0 = laplacian(cycle_graph(6))
    tr = integrate_flow(q0, 0.1)
    assert not tr.samples[-1].state.is_laplacian
    with pytest.raises(LeftLaplacianCone) as exc:
        integrate_flow(q0, 0.1, on_cone_exit="halt")
    assert exc.value.t > 0


def test_merge_threshold_halts_or_merges():
    # a heavy link in a longer path: its resistance collapses first
    g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0)])
    ctl = StepControl()
    tr = integrate_flow(laplacian(g), 1.5, ctl, on_merge="halt")
    assert tr.halt_reason == "merge_threshold"
    assert tr.halt_time < 1.0


def test_merge_nodes():
    h = merge_nodes(path_graph(3), 0, 1)
    assert h.n == 2 and h.edge_list() == [(0, 1, 1.0)]
    h = merge_nodes(cycle_graph(3), 0, 1)
    assert h.edge_list() == [(0, 1, 2.0)]
    with pytest.raises(LinkNotFound):
        merge_nodes(path_graph(3), 0, 2)


def test_normalized_flow_on_cycle():
    tr = integrate_normalized_flow(laplacian(cycle_graph(6)), 0.3)
    for s in tr.samples:
        assert np.max(np.abs(s.p - 1 / 6)) <= 1e-8


def test_normalized_flow_self_consistency():
    q0 = laplacian(random_connected_graph(5, 3, seed=7))
    ts = np.linspace(0, 0.01, 21)
    tr = integrate_normalized_flow(q0, 0.01, sample_times=ts)
    for a, b, c in zip(tr.samples, tr.samples[1:], tr.samples[2:]):
        fd = (c.state.Q - a.state.Q) / (c.t - a.t)
        assert np.max(np.abs(fd - flow_rhs(b.state.Q, normalized=True))) <= 1e-4


def test_trajectory_export():
    tr = integrate_flow(laplacian(complete_graph(4)), 0.1, sample_times=[0, 0.05, 0.1])
    rows = list(tr.csv_rows())
    assert len(rows) == 3 and len(rows[0]) == len(FlowTrajectory.CSV_HEADER)
    snaps = snapshot_json(tr, [0.05])
    assert len(snaps) == 1
    q = np.array(snaps[0]["Q"])
    assert np.allclose(q.sum(axis=1), 0) and np.allclose(q, q.T)


def test_blow_up_time_cycle_six():
    assert blow_up_time(laplacian(cycle_graph(6))) == pytest.approx(0.75)
