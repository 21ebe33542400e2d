"""Resistance Ricci flow dQ/dt = 2 Q diag(p) Q.

A cycle follows the closed form for node-transitive graphs and blows up at
n/(2 mu_max). On a path only the end links move, as c0/(1 - c0 t), and the
flow halts once an end link is about to merge its nodes.

    python3 demos/ricci_flow.py
"""
import numpy as np

from resist_curve.errors import BlowUpDetected
from resist_curve.flow import blow_up_time, integrate_flow, merge_nodes, transitive_closed_form
from resist_curve.generators import cycle_graph, path_graph
from resist_curve.graph import laplacian

q0 = laplacian(cycle_graph(6))
T = blow_up_time(q0)
tr = integrate_flow(q0, 0.8 * T, sample_times=np.linspace(0, 0.8 * T, 9))
print(f"C6 blows up at T = {T}")
for s in tr.samples:
    ref = transitive_closed_form(q0, s.t)
    print(f"  t={s.t:.3f} potential={s.potential:9.5f} max|Q - closed form|={np.max(np.abs(s.state.Q - ref)):.1e}")

g = path_graph(5)
try:
    tr = integrate_flow(laplacian(g), 2.0, sample_times=np.linspace(0, 2.0, 21))
    reason, t_halt = tr.halt_reason, tr.halt_time
except BlowUpDetected as exc:
    tr, reason, t_halt = exc.trajectory, "blow_up", exc.t
last = tr.samples[-1]
print(f"path P5: flow halted ({reason}) at t = {t_halt:.6f}, end weight {-last.state.Q[0, 1]:.3g}")
for s in tr.samples[:-1:4]:
    print(f"  t={s.t:.2f} end weight {-s.state.Q[0, 1]:.5f} vs 1/(1 - t) = {1 / (1 - s.t):.5f}")
shorter = merge_nodes(g, 0, 1)
print(f"merging the end link leaves a path with {shorter.n} nodes")
